use std::collections::VecDeque;

use crate::wireframe::Wireframe;

/// Graph over segments: nodes are line segments, edges join segments that
/// share a junction (vertex). Adjacency lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentGraph {
    adjacency: Vec<Vec<usize>>,
}

impl SegmentGraph {
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }
}

/// Builds the segment graph: two segments are adjacent iff they share at
/// least one vertex index.
pub fn build_graph(w: &Wireframe) -> SegmentGraph {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); w.vertex_count()];
    for (si, &(a, b)) in w.segments().iter().enumerate() {
        incident[a].push(si);
        incident[b].push(si);
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); w.segment_count()];
    for segs in &incident {
        for (i, &s) in segs.iter().enumerate() {
            for &t in &segs[i + 1..] {
                adjacency[s].push(t);
                adjacency[t].push(s);
            }
        }
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
        adj.dedup();
    }
    SegmentGraph { adjacency }
}

/// Per-segment connected-component labels, dense from 0. Label 0 belongs to
/// the component containing segment 0; labels increase in order of first
/// appearance when scanning segments ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub label: Vec<usize>,
    pub component_count: usize,
}

pub fn connected_components(g: &SegmentGraph) -> ComponentLabeling {
    let n = g.node_count();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        label[start] = next;
        while let Some(s) = queue.pop_front() {
            for &t in g.neighbors(s) {
                if label[t] == usize::MAX {
                    label[t] = next;
                    queue.push_back(t);
                }
            }
        }
        next += 1;
    }
    ComponentLabeling { label, component_count: next }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Wireframe {
        // Edge numbering chosen so edge 9 (0-based) touches exactly
        // edges {0, 1, 5, 6}: bottom ring, offset top ring, verticals.
        let vertices = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ];
        let segments = vec![
            (0, 1), // 0
            (1, 2), // 1
            (2, 3), // 2
            (3, 0), // 3
            (7, 4), // 4
            (4, 5), // 5
            (5, 6), // 6
            (6, 7), // 7
            (0, 4), // 8
            (1, 5), // 9
            (2, 6), // 10
            (3, 7), // 11
        ];
        Wireframe::new(vertices, segments).unwrap()
    }

    #[test]
    fn cube_edges_have_four_neighbors() {
        let g = build_graph(&cube());
        for i in 0..g.node_count() {
            assert_eq!(g.degree(i), 4, "edge {i}");
        }
    }

    #[test]
    fn cube_vertical_edge_neighbors() {
        // The vertical stud joining the bottom-ring junction shared by edges
        // {0, 1} to the top-ring junction shared by edges {5, 6}.
        let g = build_graph(&cube());
        assert_eq!(g.neighbors(9), &[0, 1, 5, 6]);
    }

    #[test]
    fn single_segment_has_empty_adjacency() {
        let w = Wireframe::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            vec![(0, 1)],
        )
        .unwrap();
        let g = build_graph(&w);
        assert_eq!(g.node_count(), 1);
        assert!(g.neighbors(0).is_empty());
    }

    #[test]
    fn adjacency_is_symmetric_and_irreflexive() {
        let g = build_graph(&cube());
        for i in 0..g.node_count() {
            assert!(!g.neighbors(i).contains(&i));
            for &j in g.neighbors(i) {
                assert!(g.neighbors(j).contains(&i));
            }
        }
        // Handshake identity: degree sum is twice the adjacent-pair count.
        let degree_sum: usize = (0..g.node_count()).map(|i| g.degree(i)).sum();
        let pairs: usize = (0..g.node_count())
            .map(|i| g.neighbors(i).iter().filter(|&&j| j > i).count())
            .sum();
        assert_eq!(degree_sum, 2 * pairs);
    }

    #[test]
    fn components_of_cube_and_empty() {
        let labels = connected_components(&build_graph(&cube()));
        assert_eq!(labels.component_count, 1);
        assert!(labels.label.iter().all(|&l| l == 0));

        let empty = connected_components(&build_graph(&Wireframe::empty()));
        assert_eq!(empty.component_count, 0);
        assert!(empty.label.is_empty());
    }

    #[test]
    fn two_disjoint_squares_have_two_components() {
        let verts = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [3.0, 0.0, 0.0],
            [4.0, 0.0, 0.0],
            [4.0, 1.0, 0.0],
            [3.0, 1.0, 0.0],
        ];
        let segs = vec![
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 0),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 4),
        ];
        let w = Wireframe::new(verts, segs).unwrap();
        let labels = connected_components(&build_graph(&w));
        assert_eq!(labels.component_count, 2);
        assert_eq!(&labels.label[..4], &[0, 0, 0, 0]);
        assert_eq!(&labels.label[4..], &[1, 1, 1, 1]);
    }
}
