//! Canonical ordering and semantic sequencing.
//!
//! Vertices sort ascending by (z, y, x); segments store their lower vertex
//! first and pre-sort by endpoint pair. A breadth-first traversal of the
//! segment graph then groups each connected component into a contiguous run,
//! visiting components by their minimal pre-sorted segment and expanding
//! neighbors in ascending index order.

use std::collections::VecDeque;

use crate::graph::{build_graph, SegmentGraph};
use crate::wireframe::Wireframe;

/// Permutations taking an input wireframe to its canonical, sequenced form.
///
/// `vertex_perm[k]` is the input index of canonical vertex `k`;
/// `segment_perm[k]` is the input index of the segment at sequence
/// position `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalOrder {
    pub vertex_perm: Vec<usize>,
    pub segment_perm: Vec<usize>,
}

/// A wireframe rewritten into canonical sequence order, with its graph.
#[derive(Debug, Clone)]
pub struct SequencedWireframe {
    pub wireframe: Wireframe,
    pub graph: SegmentGraph,
    pub order: CanonicalOrder,
}

/// Sorts vertices by (z, y, x) with the input index as the exact-tie
/// fallback, orders each segment's endpoints ascending, and pre-sorts
/// segments by endpoint pair. Returns the rewritten wireframe plus the
/// permutations applied (BFS not yet applied; see [`sequence`]).
pub fn canonicalize(w: &Wireframe) -> (Wireframe, CanonicalOrder) {
    let mut vertex_perm: Vec<usize> = (0..w.vertex_count()).collect();
    vertex_perm.sort_by(|&i, &j| {
        let a = w.vertices()[i];
        let b = w.vertices()[j];
        (a[2], a[1], a[0], i)
            .partial_cmp(&(b[2], b[1], b[0], j))
            .unwrap()
    });
    let mut rank = vec![0usize; w.vertex_count()];
    for (new, &old) in vertex_perm.iter().enumerate() {
        rank[old] = new;
    }

    let mut keyed: Vec<(usize, usize, usize)> = w
        .segments()
        .iter()
        .enumerate()
        .map(|(si, &(a, b))| {
            let (a, b) = (rank[a], rank[b]);
            let (a, b) = (a.min(b), a.max(b));
            (a, b, si)
        })
        .collect();
    keyed.sort_unstable();

    let vertices = vertex_perm.iter().map(|&old| w.vertices()[old]).collect();
    let segments = keyed.iter().map(|&(a, b, _)| (a, b)).collect();
    let segment_perm = keyed.iter().map(|&(_, _, si)| si).collect();
    let canonical = Wireframe::new(vertices, segments).expect("canonicalize preserves invariants");
    (canonical, CanonicalOrder { vertex_perm, segment_perm })
}

/// Breadth-first segment order for a canonical wireframe: components in
/// ascending order of their minimal segment index, BFS within each from that
/// segment, neighbors expanded ascending. Every component occupies a
/// contiguous interval of the result.
pub fn bfs_order(g: &SegmentGraph) -> Vec<usize> {
    let n = g.node_count();
    let mut visited = vec![false; n];
    let mut sequence = Vec::with_capacity(n);
    for start in 0..n {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            sequence.push(s);
            for &t in g.neighbors(s) {
                if !visited[t] {
                    visited[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }
    sequence
}

/// Full sequencing pipeline: canonicalize, build the segment graph, apply
/// the BFS order to segments, and rebuild the graph over the final order.
/// `order` maps sequence positions back to input indices.
pub fn sequence(w: &Wireframe) -> SequencedWireframe {
    let (canon, order) = canonicalize(w);
    let graph = build_graph(&canon);
    let bfs = bfs_order(&graph);
    let segments: Vec<(usize, usize)> = bfs.iter().map(|&k| canon.segments()[k]).collect();
    let segment_perm = bfs.iter().map(|&k| order.segment_perm[k]).collect();
    let wireframe = Wireframe::new(canon.vertices().to_vec(), segments)
        .expect("sequencing preserves invariants");
    let graph = build_graph(&wireframe);
    SequencedWireframe {
        wireframe,
        graph,
        order: CanonicalOrder { vertex_perm: order.vertex_perm, segment_perm },
    }
}
