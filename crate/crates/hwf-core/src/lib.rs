//! Core wireframe data model: vertices joined by straight line segments,
//! the segment-adjacency graph derived from shared junctions, connectivity
//! analysis, canonical ordering, and per-segment feature extraction.
//!
//! Everything here is immutable after construction and safe to share across
//! threads; all operations are pure functions.

mod error;
mod features;
mod graph;
mod io;
mod order;
mod wireframe;

pub use error::WireframeError;
pub use features::{
    bin_center, extract_features, quantize_unit, SegmentFeatures, ANGLE_MAX_DEG, COORD_BINS,
    FEATURE_COUNT, LENGTH_MAX,
};
pub use graph::{build_graph, connected_components, ComponentLabeling, SegmentGraph};
pub use io::{format_wireframe, parse_wireframe, read_wireframe, write_wireframe};
pub use order::{bfs_order, canonicalize, sequence, CanonicalOrder, SequencedWireframe};
pub use wireframe::{merge_duplicate_vertices, normalize, split_components, Wireframe};

/// Grid resolution shared by coordinate discretization and duplicate-vertex
/// merging. Generated coordinates are always cell centers of this grid, so
/// cell equality is an exact, parameter-free merge criterion.
pub const MERGE_GRID_BINS: u32 = 128;
