//! Shared per-wireframe preparation for training and tokenization:
//! canonical sequencing, segment graph, discrete features, and the
//! vertex-incidence groups the quantizer redistributes features with.

use std::rc::Rc;

use hwf_core::{extract_features, sequence, SegmentFeatures, Wireframe};

use crate::error::ModelError;
use crate::quantize::vertex_groups;

pub struct PreparedItem {
    /// Canonically sequenced wireframe (vertices z-y-x sorted, segments in
    /// BFS order).
    pub wireframe: Wireframe,
    /// Segment adjacency matching the sequenced order.
    pub adjacency: Rc<Vec<Vec<usize>>>,
    pub features: SegmentFeatures,
    /// Per vertex, the segments incident to it.
    pub vertex_groups: Rc<Vec<Vec<usize>>>,
}

impl PreparedItem {
    pub fn segment_count(&self) -> usize {
        self.wireframe.segment_count()
    }

    /// One index list per feature column, for embedding lookups.
    pub fn feature_columns(&self) -> Vec<Rc<Vec<usize>>> {
        (0..hwf_core::FEATURE_COUNT)
            .map(|f| Rc::new(self.features.iter().map(|row| row[f] as usize).collect()))
            .collect()
    }

    /// True coordinate bins, 6 per segment (endpoint A xyz, endpoint B xyz).
    pub fn coordinate_bins(&self) -> Vec<[u8; 6]> {
        self.features
            .iter()
            .map(|row| [row[0], row[1], row[2], row[3], row[4], row[5]])
            .collect()
    }
}

pub fn prepare(w: &Wireframe) -> Result<PreparedItem, ModelError> {
    let seq = sequence(w);
    let features = extract_features(&seq.wireframe, &seq.graph)?;
    let adjacency = Rc::new(seq.graph.adjacency().to_vec());
    let groups = vertex_groups(seq.wireframe.segments(), seq.wireframe.vertex_count());
    Ok(PreparedItem {
        wireframe: seq.wireframe,
        adjacency,
        features,
        vertex_groups: groups,
    })
}
