//! Property tests over randomly assembled wireframes.

use hwf_core::{
    build_graph, connected_components, merge_duplicate_vertices, normalize, sequence,
    split_components, Wireframe, MERGE_GRID_BINS,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random wireframe: scattered vertices joined by a random
/// set of non-duplicate segments, everything reachable from a chain so no
/// vertex is orphaned.
fn random_wireframe(seed: u64) -> Wireframe {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..20usize);
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        vertices.push([
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ]);
    }
    let mut segments: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let extra = rng.gen_range(0..n);
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if !segments.contains(&key) {
            segments.push(key);
        }
    }
    Wireframe::new(vertices, segments).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_symmetric_and_handshake(seed in any::<u64>()) {
        let w = random_wireframe(seed);
        let g = build_graph(&w);
        let mut degree_sum = 0;
        for i in 0..g.node_count() {
            prop_assert!(!g.neighbors(i).contains(&i));
            degree_sum += g.degree(i);
            for &j in g.neighbors(i) {
                prop_assert!(g.neighbors(j).contains(&i));
            }
        }
        let pairs: usize = (0..g.node_count())
            .map(|i| g.neighbors(i).iter().filter(|&&j| j > i).count())
            .sum();
        prop_assert_eq!(degree_sum, 2 * pairs);
    }

    #[test]
    fn split_parts_are_connected(seed in any::<u64>()) {
        let w = random_wireframe(seed);
        let parts = split_components(&w);
        let total: usize = parts.iter().map(|p| p.segment_count()).sum();
        prop_assert_eq!(total, w.segment_count());
        for p in &parts {
            let labels = connected_components(&build_graph(p));
            prop_assert_eq!(labels.component_count, 1);
        }
    }

    #[test]
    fn merge_is_idempotent(seed in any::<u64>()) {
        let w = random_wireframe(seed);
        let once = merge_duplicate_vertices(&w, MERGE_GRID_BINS);
        let twice = merge_duplicate_vertices(&once, MERGE_GRID_BINS);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let w = random_wireframe(seed);
        let a = normalize(&w).unwrap();
        let b = normalize(&a).unwrap();
        for (u, v) in a.vertices().iter().zip(b.vertices()) {
            for k in 0..3 {
                prop_assert!((u[k] - v[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalize_commutes_with_cube_symmetries(seed in any::<u64>(), quarter_turns in 0u8..4, mirror in any::<bool>()) {
        let w = random_wireframe(seed);
        let sym = |v: [f64; 3]| {
            let mut p = v;
            for _ in 0..quarter_turns {
                p = [-p[1], p[0], p[2]];
            }
            if mirror {
                p[0] = -p[0];
            }
            p
        };
        let a = normalize(&w.map_vertices(sym)).unwrap();
        let b = normalize(&w).unwrap().map_vertices(sym);
        for (u, v) in a.vertices().iter().zip(b.vertices()) {
            for k in 0..3 {
                prop_assert!((u[k] - v[k]).abs() < 1e-9, "axis {} {} vs {}", k, u[k], v[k]);
            }
        }
    }

    #[test]
    fn sequence_keeps_components_contiguous(seed in any::<u64>()) {
        let w = random_wireframe(seed);
        let s = sequence(&w);
        let labels = connected_components(&s.graph);
        // Positions of each label must form an interval.
        for comp in 0..labels.component_count {
            let positions: Vec<usize> = labels
                .label
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == comp)
                .map(|(i, _)| i)
                .collect();
            let lo = positions[0];
            prop_assert!(positions.iter().enumerate().all(|(k, &p)| p == lo + k));
        }
    }
}
