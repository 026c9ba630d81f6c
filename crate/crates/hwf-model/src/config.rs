//! Model dimension presets. `desk` keeps every experiment runnable on one
//! CPU core; `paper` mirrors the published scale and is config-complete but
//! not exercised by the test suite.

use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub struct AeConfig {
    /// Width of the summed per-feature embeddings.
    pub embed_dim: usize,
    /// Graph-conv widths; the last one is the latent width.
    pub gcn_dims: Vec<usize>,
    pub latent_dim: usize,
    pub enc_attn_layers: usize,
    pub dec_attn_layers: usize,
    pub attn_heads: usize,
    pub attn_window: usize,
    /// Bits per code; codebook size is 2^code_bits.
    pub code_bits: usize,
    /// Residual quantization depth.
    pub depth: usize,
    /// Channel widths of the four residual conv stages.
    pub conv_channels: [usize; 4],
    pub coord_bins: usize,
    /// Std-dev (in bins) of the smoothed coordinate targets.
    pub target_sigma: f64,
    pub commit_weight: f64,
    pub entropy_weight: f64,
}

impl AeConfig {
    pub fn desk() -> Self {
        Self {
            embed_dim: 32,
            gcn_dims: vec![32, 48, 64],
            latent_dim: 64,
            enc_attn_layers: 2,
            dec_attn_layers: 2,
            attn_heads: 4,
            attn_window: 16,
            code_bits: 6,
            depth: 2,
            conv_channels: [16, 16, 24, 32],
            coord_bins: 128,
            target_sigma: 1.0,
            commit_weight: 0.25,
            entropy_weight: 0.1,
        }
    }

    pub fn paper() -> Self {
        Self {
            embed_dim: 196,
            gcn_dims: vec![64, 128, 256, 256, 384],
            latent_dim: 384,
            enc_attn_layers: 4,
            dec_attn_layers: 2,
            attn_heads: 12,
            attn_window: 64,
            code_bits: 13,
            depth: 2,
            conv_channels: [128, 192, 256, 384],
            coord_bins: 128,
            target_sigma: 1.0,
            commit_weight: 0.25,
            entropy_weight: 0.1,
        }
    }

    pub fn codebook_size(&self) -> usize {
        1 << self.code_bits
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.gcn_dims.last() != Some(&self.latent_dim) {
            return Err(ModelError::Config(
                "last graph-conv width must equal latent_dim".into(),
            ));
        }
        if self.latent_dim % self.attn_heads != 0 {
            return Err(ModelError::Config("latent_dim must divide into heads".into()));
        }
        if self.depth == 0 {
            return Err(ModelError::Config("depth must be at least 1".into()));
        }
        if self.code_bits == 0 || self.code_bits > 31 {
            return Err(ModelError::Config("code_bits out of range".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub code_bits: usize,
    pub depth: usize,
    pub model_dim: usize,
    pub heads: usize,
    pub coarse_layers: usize,
    pub fine_layers: usize,
    /// Feed-forward hidden width as a multiple of `model_dim`.
    pub ffn_mult: usize,
    /// Hard cap on flat token-sequence length (excluding the stop token).
    pub max_tokens: usize,
}

impl GenConfig {
    pub fn desk() -> Self {
        Self {
            code_bits: 6,
            depth: 2,
            model_dim: 64,
            heads: 4,
            coarse_layers: 2,
            fine_layers: 1,
            ffn_mult: 4,
            max_tokens: 404,
        }
    }

    pub fn paper() -> Self {
        Self {
            code_bits: 13,
            depth: 2,
            model_dim: 512,
            heads: 8,
            coarse_layers: 12,
            fine_layers: 2,
            ffn_mult: 4,
            max_tokens: 1624,
        }
    }

    /// Tokens per segment.
    pub fn block_len(&self) -> usize {
        2 * self.depth
    }

    /// Stop sentinel; one past the largest code.
    pub fn stop_token(&self) -> u32 {
        1 << self.code_bits
    }

    /// Output vocabulary: codes plus the stop class.
    pub fn vocab(&self) -> usize {
        (1 << self.code_bits) + 1
    }

    pub fn max_segments(&self) -> usize {
        self.max_tokens / self.block_len()
    }

    /// `segment_budget` is the dataset's exclusive segment-count cap; the
    /// sequence budget must cover every sequence the dataset can produce.
    pub fn validate(&self, segment_budget: usize) -> Result<(), ModelError> {
        if self.model_dim % self.heads != 0 {
            return Err(ModelError::Config("model_dim must divide into heads".into()));
        }
        if self.max_tokens % self.block_len() != 0 {
            return Err(ModelError::Config(
                "max_tokens must be a multiple of 2 * depth".into(),
            ));
        }
        if self.max_segments() < segment_budget {
            return Err(ModelError::Config(format!(
                "max_tokens {} covers only {} segments; dataset filter allows up to {}",
                self.max_tokens,
                self.max_segments(),
                segment_budget
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_preset_sequence_arithmetic() {
        let g = GenConfig::paper();
        assert_eq!(g.block_len(), 4);
        assert_eq!(g.max_tokens, 1624);
        assert_eq!(g.max_segments(), 406);
        // Dataset filter keeps wireframes strictly under 400 segments.
        g.validate(400).unwrap();
        assert_eq!(g.stop_token(), 8192);
        assert_eq!(g.vocab(), 8193);
    }

    #[test]
    fn desk_preset_sequence_arithmetic() {
        let g = GenConfig::desk();
        assert_eq!(g.max_segments(), 101);
        g.validate(100).unwrap();
        assert!(g.validate(102).is_err());
    }

    #[test]
    fn ae_presets_validate() {
        AeConfig::desk().validate().unwrap();
        AeConfig::paper().validate().unwrap();
        assert_eq!(AeConfig::paper().codebook_size(), 8192);
        assert_eq!(AeConfig::paper().code_bits, 13); // log2(8192)
    }
}
