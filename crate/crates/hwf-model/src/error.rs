use std::fmt;
use std::path::PathBuf;

use hwf_core::WireframeError;
use hwf_tensor::TensorError;

#[derive(Debug)]
pub enum ModelError {
    Wireframe(WireframeError),
    Tensor(TensorError),
    /// Training loss became non-finite.
    Divergence { epoch: u32, loss: f64 },
    InvalidTokens(String),
    Config(String),
    Io { path: PathBuf, source: std::io::Error },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Wireframe(e) => write!(f, "{e}"),
            Self::Tensor(e) => write!(f, "{e}"),
            Self::Divergence { epoch, loss } => {
                write!(f, "training diverged at epoch {epoch} (loss {loss})")
            }
            Self::InvalidTokens(msg) => write!(f, "invalid token sequence: {msg}"),
            Self::Config(msg) => write!(f, "invalid model config: {msg}"),
            Self::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for ModelError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Self::Wireframe(e) => Some(e),
            Self::Tensor(e) => Some(e),
            Self::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<WireframeError> for ModelError {
    fn from(e: WireframeError) -> Self {
        Self::Wireframe(e)
    }
}

impl From<TensorError> for ModelError {
    fn from(e: TensorError) -> Self {
        Self::Tensor(e)
    }
}
