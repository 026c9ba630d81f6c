//! Quantized token sequences and their binary file format.
//!
//! File layout (little-endian): magic b"HWTK", u32 version (1), u32
//! code_bits, u32 depth, u32 segment_count, then 2 * depth * segment_count
//! u32 code tokens in sequence order, then the stop sentinel (2^code_bits).

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::ModelError;

const MAGIC: &[u8; 4] = b"HWTK";
const VERSION: u32 = 1;

/// Code tokens for one wireframe, in sequence order; the stop sentinel is
/// implicit (it is always `2^code_bits` and sits at the end on disk).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub code_bits: u32,
    pub depth: u32,
    pub tokens: Vec<u32>,
}

impl TokenSequence {
    pub fn new(code_bits: u32, depth: u32, tokens: Vec<u32>) -> Result<Self, ModelError> {
        let seq = Self { code_bits, depth, tokens };
        seq.validate()?;
        Ok(seq)
    }

    pub fn block_len(&self) -> usize {
        2 * self.depth as usize
    }

    pub fn segment_count(&self) -> usize {
        self.tokens.len() / self.block_len()
    }

    pub fn stop_token(&self) -> u32 {
        1 << self.code_bits
    }

    /// Sequence length including the stop token: 2 * D * N + 1.
    pub fn len_with_stop(&self) -> usize {
        self.tokens.len() + 1
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.depth == 0 {
            return Err(ModelError::InvalidTokens("depth must be positive".into()));
        }
        if self.tokens.len() % self.block_len() != 0 {
            return Err(ModelError::InvalidTokens(format!(
                "length {} is not a multiple of {}",
                self.tokens.len(),
                self.block_len()
            )));
        }
        if let Some(&bad) = self.tokens.iter().find(|&&t| t >= self.stop_token()) {
            return Err(ModelError::InvalidTokens(format!(
                "token {bad} outside code range [0, {})",
                self.stop_token()
            )));
        }
        Ok(())
    }
}

pub fn write_tokens(path: &Path, seq: &TokenSequence) -> Result<(), ModelError> {
    seq.validate()?;
    let mut buf = Vec::with_capacity(24 + 4 * seq.tokens.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&seq.code_bits.to_le_bytes());
    buf.extend_from_slice(&seq.depth.to_le_bytes());
    buf.extend_from_slice(&(seq.segment_count() as u32).to_le_bytes());
    for t in &seq.tokens {
        buf.extend_from_slice(&t.to_le_bytes());
    }
    buf.extend_from_slice(&seq.stop_token().to_le_bytes());
    let mut f = fs::File::create(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    f.write_all(&buf).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_tokens(path: &Path) -> Result<TokenSequence, ModelError> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|source| ModelError::Io { path: path.to_path_buf(), source })?;

    let mut at = 0usize;
    let mut take = |n: usize| -> Result<&[u8], ModelError> {
        if at + n > bytes.len() {
            return Err(ModelError::InvalidTokens("truncated token file".into()));
        }
        let s = &bytes[at..at + n];
        at += n;
        Ok(s)
    };
    let u32_of = |b: &[u8]| u32::from_le_bytes(b.try_into().unwrap());

    if take(4)? != MAGIC {
        return Err(ModelError::InvalidTokens("bad magic".into()));
    }
    if u32_of(take(4)?) != VERSION {
        return Err(ModelError::InvalidTokens("unsupported version".into()));
    }
    let code_bits = u32_of(take(4)?);
    let depth = u32_of(take(4)?);
    let segment_count = u32_of(take(4)?) as usize;
    let count = segment_count * 2 * depth as usize;
    let mut tokens = Vec::with_capacity(count);
    for _ in 0..count {
        tokens.push(u32_of(take(4)?));
    }
    let stop = u32_of(take(4)?);
    if stop != 1 << code_bits {
        return Err(ModelError::InvalidTokens("missing stop sentinel".into()));
    }
    TokenSequence::new(code_bits, depth, tokens)
}
