use std::fmt;
use std::path::PathBuf;

use hwf_core::WireframeError;

#[derive(Debug)]
pub enum SynthError {
    /// Input polygon is not simple, not counterclockwise, or too small.
    InvalidPolygon { reason: String },
    /// The skeleton wavefront failed to resolve (numeric degeneracy).
    SkeletonFailure { reason: String },
    /// Layout constraints could not be satisfied within the retry budget.
    SynthesisFailure { reason: String },
    /// Invalid configuration value.
    InvalidConfig { reason: String },
    Wireframe(WireframeError),
    Io { path: PathBuf, source: std::io::Error },
    Json { path: PathBuf, source: serde_json::Error },
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidPolygon { reason } => write!(f, "invalid polygon: {reason}"),
            Self::SkeletonFailure { reason } => write!(f, "straight skeleton failed: {reason}"),
            Self::SynthesisFailure { reason } => write!(f, "synthesis failed: {reason}"),
            Self::InvalidConfig { reason } => write!(f, "invalid config: {reason}"),
            Self::Wireframe(e) => write!(f, "{e}"),
            Self::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Self::Json { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for SynthError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Self::Wireframe(e) => Some(e),
            Self::Io { source, .. } => Some(source),
            Self::Json { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<WireframeError> for SynthError {
    fn from(e: WireframeError) -> Self {
        Self::Wireframe(e)
    }
}
