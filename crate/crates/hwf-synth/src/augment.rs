//! Data augmentation: quarter-turn rotations about the vertical axis,
//! mirror across the x = 0 plane, per-axis scaling in [0.9, 1.1], and
//! per-axis translation in [-0.1, 0.1].

use hwf_core::{normalize, Wireframe};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One of the eight symmetry variants used for augmentation and for
/// reference-set expansion at evaluation time: `quarter_turns` rotations by
/// 90 degrees about z, then an optional mirror of the x axis. Both maps are
/// coordinate swaps and sign flips, hence exact in floating point.
pub fn symmetry_variant(w: &Wireframe, quarter_turns: u8, mirror: bool) -> Wireframe {
    w.map_vertices(|v| {
        let mut p = v;
        for _ in 0..quarter_turns % 4 {
            p = [-p[1], p[0], p[2]];
        }
        if mirror {
            p[0] = -p[0];
        }
        p
    })
}

/// Random augmentation of a normalized wireframe. Draw order is fixed:
/// rotation, mirror, scale (x, y, z), translation (x, y, z). The result is
/// renormalized only if some coordinate leaves [-1, 1].
pub fn augment(w: &Wireframe, rng: &mut ChaCha8Rng) -> Wireframe {
    let quarter_turns = rng.gen_range(0..4u8);
    let mirror = rng.gen_bool(0.5);
    let scale = [
        rng.gen_range(0.9..1.1),
        rng.gen_range(0.9..1.1),
        rng.gen_range(0.9..1.1),
    ];
    let shift = [
        rng.gen_range(-0.1..0.1),
        rng.gen_range(-0.1..0.1),
        rng.gen_range(-0.1..0.1),
    ];
    let out = symmetry_variant(w, quarter_turns, mirror).map_vertices(|v| {
        [
            v[0] * scale[0] + shift[0],
            v[1] * scale[1] + shift[1],
            v[2] * scale[2] + shift[2],
        ]
    });
    let exits = out
        .vertices()
        .iter()
        .any(|v| v.iter().any(|c| c.abs() > 1.0));
    if exits {
        normalize(&out).expect("augmented wireframe keeps positive extent")
    } else {
        out
    }
}
