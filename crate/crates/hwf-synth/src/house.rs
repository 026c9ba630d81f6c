//! Lifts a 2D layout into a 3D house wireframe: exterior wall box, interior
//! room boxes, and a straight-skeleton roof. The roof, the exterior walls,
//! and each room are deliberately kept vertex-disjoint so they remain
//! separate connected components (roof eaves duplicate the wall-top
//! coordinates without sharing vertices).

use std::ops::RangeInclusive;

use hwf_core::Wireframe;
use rand_chacha::ChaCha8Rng;

use crate::error::SynthError;
use crate::layout::{generate_layout, Layout2D};
use crate::skeleton::straight_skeleton;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisConfig {
    /// Wall height as a fraction of the footprint bounding-box diagonal.
    pub wall_height: f64,
    /// Roof rise per unit of skeleton offset.
    pub roof_pitch: f64,
    /// Houses with this many segments or more are rejected.
    pub max_segments: usize,
    pub room_count_range: RangeInclusive<usize>,
    /// Footprint corner budget (rounded down to an even count).
    pub footprint_corners: RangeInclusive<usize>,
    pub seed: u64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            wall_height: 0.4,
            roof_pitch: 0.5,
            max_segments: 100,
            room_count_range: 0..=3,
            footprint_corners: 4..=12,
            seed: 0,
        }
    }
}

impl SynthesisConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.wall_height <= 0.0 {
            return Err(SynthError::InvalidConfig { reason: "wall_height must be > 0".into() });
        }
        if self.roof_pitch <= 0.0 {
            return Err(SynthError::InvalidConfig { reason: "roof_pitch must be > 0".into() });
        }
        if self.max_segments < 12 {
            return Err(SynthError::InvalidConfig { reason: "max_segments must be >= 12".into() });
        }
        if self.footprint_corners.is_empty() || *self.footprint_corners.end() < 4 {
            return Err(SynthError::InvalidConfig {
                reason: "footprint_corners must include a value >= 4".into(),
            });
        }
        Ok(())
    }
}

struct Builder {
    vertices: Vec<[f64; 3]>,
    segments: Vec<(usize, usize)>,
}

impl Builder {
    fn new() -> Self {
        Self { vertices: Vec::new(), segments: Vec::new() }
    }

    fn vertex(&mut self, p: [f64; 3]) -> usize {
        self.vertices.push(p);
        self.vertices.len() - 1
    }

    fn segment(&mut self, a: usize, b: usize) {
        self.segments.push((a, b));
    }

    /// Prism over a closed 2D ring: base ring, top ring, and one vertical
    /// stud per corner.
    fn prism(&mut self, ring: &[[f64; 2]], z0: f64, z1: f64) {
        let base: Vec<usize> = ring.iter().map(|&[x, y]| self.vertex([x, y, z0])).collect();
        let top: Vec<usize> = ring.iter().map(|&[x, y]| self.vertex([x, y, z1])).collect();
        let k = ring.len();
        for i in 0..k {
            self.segment(base[i], base[(i + 1) % k]);
            self.segment(top[i], top[(i + 1) % k]);
            self.segment(base[i], top[i]);
        }
    }
}

/// Assembles the 3D wireframe for a layout. Components: one exterior wall
/// box, one roof (eave ring plus lifted skeleton arcs), and one box per
/// room. Vertical axis is z.
pub fn assemble_house(layout: &Layout2D, cfg: &SynthesisConfig) -> Result<Wireframe, SynthError> {
    cfg.validate()?;
    let (lo, hi) = bounds(&layout.footprint);
    let diag = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt();
    let wall_h = cfg.wall_height * diag;

    let mut b = Builder::new();

    // Exterior walls.
    b.prism(&layout.footprint, 0.0, wall_h);

    // Roof: skeleton nodes lifted by pitch * offset-time above the wall top,
    // with its own copy of the eave ring.
    let skeleton = straight_skeleton(&layout.footprint)?;
    let roof_nodes: Vec<usize> = skeleton
        .nodes
        .iter()
        .map(|n| b.vertex([n.pos[0], n.pos[1], wall_h + cfg.roof_pitch * n.time]))
        .collect();
    let k = layout.footprint.len();
    for i in 0..k {
        b.segment(roof_nodes[i], roof_nodes[(i + 1) % k]); // eaves
    }
    for &(u, v) in &skeleton.arcs {
        b.segment(roof_nodes[u], roof_nodes[v]);
    }

    // Interior rooms.
    for room in &layout.rooms {
        b.prism(&room.corners_ccw(), 0.0, wall_h);
    }

    Wireframe::new(b.vertices, b.segments).map_err(SynthError::from)
}

/// Generates a layout with the given rng and assembles it.
pub fn synthesize_house(cfg: &SynthesisConfig, rng: &mut ChaCha8Rng) -> Result<Wireframe, SynthError> {
    let layout = generate_layout(cfg, rng)?;
    assemble_house(&layout, cfg)
}

fn bounds(poly: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = poly[0];
    let mut hi = poly[0];
    for p in poly {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}
