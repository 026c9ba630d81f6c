use std::fmt;
use std::path::PathBuf;

/// Errors produced while constructing, transforming, or (de)serializing
/// wireframes.
#[derive(Debug)]
pub enum WireframeError {
    /// A segment references a vertex index outside the vertex list.
    IndexOutOfRange { segment: usize, index: usize },
    /// A segment joins a vertex to itself.
    SelfLoop { segment: usize },
    /// Two segments join the same unordered vertex pair.
    DuplicateSegment { segment: usize },
    /// A segment's endpoints carry identical coordinates.
    ZeroLengthSegment { segment: usize },
    /// A vertex coordinate is NaN or infinite.
    NonFiniteVertex { vertex: usize },
    /// A vertex is not referenced by any segment.
    OrphanVertex { vertex: usize },
    /// Normalization of an empty or zero-extent wireframe.
    DegenerateExtent,
    /// Text-format parse failure.
    Parse { line: usize, message: String },
    /// I/O failure, with the offending path attached.
    Io { path: PathBuf, source: std::io::Error },
}

impl fmt::Display for WireframeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::IndexOutOfRange { segment, index } => {
                write!(f, "segment {segment} references out-of-range vertex {index}")
            }
            Self::SelfLoop { segment } => write!(f, "segment {segment} joins a vertex to itself"),
            Self::DuplicateSegment { segment } => {
                write!(f, "segment {segment} duplicates an earlier segment")
            }
            Self::ZeroLengthSegment { segment } => {
                write!(f, "segment {segment} has zero length")
            }
            Self::NonFiniteVertex { vertex } => {
                write!(f, "vertex {vertex} has a non-finite coordinate")
            }
            Self::OrphanVertex { vertex } => {
                write!(f, "vertex {vertex} is not referenced by any segment")
            }
            Self::DegenerateExtent => {
                write!(f, "wireframe has no spatial extent; cannot normalize")
            }
            Self::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Self::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for WireframeError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Self::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
