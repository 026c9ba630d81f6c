//! Versioned binary checkpoint container.
//!
//! Layout (all integers little-endian):
//!   magic  b"HWCK"
//!   u32    format version (1)
//!   u32    config byte length, then that many UTF-8 bytes of
//!          `key = value` lines
//!   u32    tensor count, then per tensor:
//!            u16 name length, name bytes,
//!            u32 rows, u32 cols,
//!            rows*cols f64 values, row-major

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::params::{ParamStore, TensorError};

const MAGIC: &[u8; 4] = b"HWCK";
const VERSION: u32 = 1;

/// A parameter store plus the config lines needed to rebuild the model.
pub struct Checkpoint {
    pub config: BTreeMap<String, String>,
    pub params: ParamStore,
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<(), TensorError> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());

    let mut config_text = String::new();
    for (k, v) in &ckpt.config {
        config_text.push_str(&format!("{k} = {v}\n"));
    }
    buf.extend_from_slice(&(config_text.len() as u32).to_le_bytes());
    buf.extend_from_slice(config_text.as_bytes());

    buf.extend_from_slice(&(ckpt.params.len() as u32).to_le_bytes());
    for (name, tensor) in ckpt.params.iter() {
        buf.extend_from_slice(&(name.len() as u16).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        buf.extend_from_slice(&(tensor.nrows() as u32).to_le_bytes());
        buf.extend_from_slice(&(tensor.ncols() as u32).to_le_bytes());
        for v in tensor.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, TensorError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut at = 0usize;

    let take = |at: &mut usize, n: usize| -> Result<&[u8], TensorError> {
        if *at + n > bytes.len() {
            return Err(TensorError::Checkpoint("truncated file".into()));
        }
        let s = &bytes[*at..*at + n];
        *at += n;
        Ok(s)
    };

    if take(&mut at, 4)? != MAGIC {
        return Err(TensorError::Checkpoint("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap());
    if version != VERSION {
        return Err(TensorError::Checkpoint(format!("unsupported version {version}")));
    }

    let config_len = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
    let config_text = String::from_utf8(take(&mut at, config_len)?.to_vec())
        .map_err(|_| TensorError::Checkpoint("config is not UTF-8".into()))?;
    let mut config = BTreeMap::new();
    for line in config_text.lines() {
        if let Some((k, v)) = line.split_once('=') {
            config.insert(k.trim().to_string(), v.trim().to_string());
        }
    }

    let count = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap());
    let mut params = ParamStore::new();
    for _ in 0..count {
        let name_len = u16::from_le_bytes(take(&mut at, 2)?.try_into().unwrap()) as usize;
        let name = String::from_utf8(take(&mut at, name_len)?.to_vec())
            .map_err(|_| TensorError::Checkpoint("tensor name is not UTF-8".into()))?;
        let rows = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
        let raw = take(&mut at, rows * cols * 8)?;
        let values: Vec<f64> = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let tensor = Array2::from_shape_vec((rows, cols), values)
            .map_err(|e| TensorError::Checkpoint(e.to_string()))?;
        params.register(&name, tensor)?;
    }
    Ok(Checkpoint { config, params })
}
