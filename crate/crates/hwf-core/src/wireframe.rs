use std::collections::HashMap;

use crate::error::WireframeError;
use crate::graph::{build_graph, connected_components};

/// A 3D wireframe: a set of vertices and undirected straight line segments.
///
/// Invariants enforced at construction:
/// - every segment joins two distinct, in-range vertices,
/// - no duplicate segments under unordered-pair equality,
/// - no zero-length segments (identical endpoint coordinates),
/// - all coordinates finite,
/// - every vertex is referenced by at least one segment.
///
/// Segments are stored with their smaller vertex index first.
#[derive(Debug, Clone, PartialEq)]
pub struct Wireframe {
    vertices: Vec<[f64; 3]>,
    segments: Vec<(usize, usize)>,
}

impl Wireframe {
    pub fn new(
        vertices: Vec<[f64; 3]>,
        segments: Vec<(usize, usize)>,
    ) -> Result<Self, WireframeError> {
        for (vi, v) in vertices.iter().enumerate() {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(WireframeError::NonFiniteVertex { vertex: vi });
            }
        }
        let mut referenced = vec![false; vertices.len()];
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut canonical = Vec::with_capacity(segments.len());
        for (si, &(a, b)) in segments.iter().enumerate() {
            for idx in [a, b] {
                if idx >= vertices.len() {
                    return Err(WireframeError::IndexOutOfRange { segment: si, index: idx });
                }
            }
            if a == b {
                return Err(WireframeError::SelfLoop { segment: si });
            }
            let key = (a.min(b), a.max(b));
            if seen.insert(key, si).is_some() {
                return Err(WireframeError::DuplicateSegment { segment: si });
            }
            if vertices[a] == vertices[b] {
                return Err(WireframeError::ZeroLengthSegment { segment: si });
            }
            referenced[a] = true;
            referenced[b] = true;
            canonical.push(key);
        }
        if let Some(vi) = referenced.iter().position(|r| !r) {
            return Err(WireframeError::OrphanVertex { vertex: vi });
        }
        Ok(Self { vertices, segments: canonical })
    }

    /// An empty wireframe (no vertices, no segments).
    pub fn empty() -> Self {
        Self { vertices: Vec::new(), segments: Vec::new() }
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn segments(&self) -> &[(usize, usize)] {
        &self.segments
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Endpoint coordinates of segment `i`.
    pub fn segment_points(&self, i: usize) -> ([f64; 3], [f64; 3]) {
        let (a, b) = self.segments[i];
        (self.vertices[a], self.vertices[b])
    }

    pub fn segment_length(&self, i: usize) -> f64 {
        let (a, b) = self.segment_points(i);
        dist(a, b)
    }

    /// Axis-aligned bounding box, or `None` when there are no vertices.
    pub fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        let mut it = self.vertices.iter();
        let first = *it.next()?;
        let mut lo = first;
        let mut hi = first;
        for v in it {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        Some((lo, hi))
    }

    /// Applies a pointwise map to every vertex, keeping segments as-is.
    /// The map must not collapse any segment to zero length.
    pub fn map_vertices(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            segments: self.segments.clone(),
        }
    }
}

pub(crate) fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Centers the bounding box at the origin and scales uniformly so the
/// largest extent spans [-1, 1]. Aspect ratios are preserved.
pub fn normalize(w: &Wireframe) -> Result<Wireframe, WireframeError> {
    let (lo, hi) = w.bounding_box().ok_or(WireframeError::DegenerateExtent)?;
    let extent = (0..3).map(|k| hi[k] - lo[k]).fold(0.0f64, f64::max);
    if extent <= 0.0 {
        return Err(WireframeError::DegenerateExtent);
    }
    let center = [
        (lo[0] + hi[0]) * 0.5,
        (lo[1] + hi[1]) * 0.5,
        (lo[2] + hi[2]) * 0.5,
    ];
    let scale = 2.0 / extent;
    Ok(w.map_vertices(|v| {
        [
            (v[0] - center[0]) * scale,
            (v[1] - center[1]) * scale,
            (v[2] - center[2]) * scale,
        ]
    }))
}

fn grid_cell(v: [f64; 3], bins: u32) -> (u32, u32, u32) {
    let cell = |c: f64| -> u32 {
        let t = ((c + 1.0) * 0.5 * bins as f64).floor();
        (t.max(0.0) as u32).min(bins - 1)
    };
    (cell(v[0]), cell(v[1]), cell(v[2]))
}

/// Merges vertices that fall in the same `bins`-per-axis grid cell over
/// [-1, 1]^3, remapping segment endpoints. Segments whose endpoints merge are
/// dropped, as are segments made duplicate by the remap and vertices left
/// unreferenced. The first vertex of each cell provides the merged
/// coordinates.
pub fn merge_duplicate_vertices(w: &Wireframe, bins: u32) -> Wireframe {
    let mut cell_to_kept: HashMap<(u32, u32, u32), usize> = HashMap::new();
    // old vertex index -> representative old index
    let mut repr = Vec::with_capacity(w.vertex_count());
    for &v in w.vertices() {
        let cell = grid_cell(v, bins);
        let idx = repr.len();
        repr.push(*cell_to_kept.entry(cell).or_insert(idx));
    }

    let mut seen = std::collections::HashSet::new();
    let mut segments = Vec::new();
    for &(a, b) in w.segments() {
        let (ra, rb) = (repr[a], repr[b]);
        if ra == rb {
            continue; // collapsed
        }
        let key = (ra.min(rb), ra.max(rb));
        if seen.insert(key) {
            segments.push(key);
        }
    }

    // Compact to the vertices that survive as segment endpoints.
    let mut new_index = vec![usize::MAX; w.vertex_count()];
    let mut vertices = Vec::new();
    for &(a, b) in &segments {
        for old in [a, b] {
            if new_index[old] == usize::MAX {
                new_index[old] = vertices.len();
                vertices.push(w.vertices()[old]);
            }
        }
    }
    let segments = segments
        .iter()
        .map(|&(a, b)| {
            let (a, b) = (new_index[a], new_index[b]);
            (a.min(b), a.max(b))
        })
        .collect();
    Wireframe { vertices, segments }
}

/// Splits a wireframe into its connected components (by shared junctions),
/// reindexing vertices within each part. Parts are ordered by component
/// label; the union of the parts reproduces the input up to reindexing.
pub fn split_components(w: &Wireframe) -> Vec<Wireframe> {
    let graph = build_graph(w);
    let labels = connected_components(&graph);
    let mut parts = Vec::with_capacity(labels.component_count);
    for comp in 0..labels.component_count {
        let mut new_index = vec![usize::MAX; w.vertex_count()];
        let mut vertices = Vec::new();
        let mut segments = Vec::new();
        for (si, &(a, b)) in w.segments().iter().enumerate() {
            if labels.label[si] != comp {
                continue;
            }
            for old in [a, b] {
                if new_index[old] == usize::MAX {
                    new_index[old] = vertices.len();
                    vertices.push(w.vertices()[old]);
                }
            }
            let (a, b) = (new_index[a], new_index[b]);
            segments.push((a.min(b), a.max(b)));
        }
        parts.push(Wireframe { vertices, segments });
    }
    parts
}
