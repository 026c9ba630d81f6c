//! Procedural 2D layouts: a rectilinear footprint (a rectangle with
//! notched corners) plus axis-aligned room rectangles obtained by
//! recursively splitting a core region strictly inside the footprint.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::SynthError;
use crate::house::SynthesisConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn corners_ccw(&self) -> [[f64; 2]; 4] {
        [
            [self.min[0], self.min[1]],
            [self.max[0], self.min[1]],
            [self.max[0], self.max[1]],
            [self.min[0], self.max[1]],
        ]
    }

    pub fn interiors_overlap(&self, other: &Rect) -> bool {
        self.min[0] < other.max[0]
            && other.min[0] < self.max[0]
            && self.min[1] < other.max[1]
            && other.min[1] < self.max[1]
    }
}

/// A 2D house layout: simple rectilinear counterclockwise footprint and
/// pairwise interior-disjoint rooms strictly inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout2D {
    pub footprint: Vec<[f64; 2]>,
    pub rooms: Vec<Rect>,
}

const RETRY_BUDGET: usize = 32;

/// Generates a layout honoring the config's corner and room-count ranges.
/// Retries internally on constraint violations and reports a synthesis
/// failure once the budget is exhausted.
pub fn generate_layout(cfg: &SynthesisConfig, rng: &mut ChaCha8Rng) -> Result<Layout2D, SynthError> {
    cfg.validate()?;
    for _ in 0..RETRY_BUDGET {
        if let Some(layout) = try_layout(cfg, rng) {
            return Ok(layout);
        }
    }
    Err(SynthError::SynthesisFailure {
        reason: format!("no valid layout in {RETRY_BUDGET} attempts"),
    })
}

fn try_layout(cfg: &SynthesisConfig, rng: &mut ChaCha8Rng) -> Option<Layout2D> {
    let width = rng.gen_range(6.0..12.0);
    let height = rng.gen_range(5.0..10.0);

    let corners = {
        let lo = *cfg.footprint_corners.start();
        let hi = *cfg.footprint_corners.end();
        let pick = rng.gen_range(lo..=hi);
        pick & !1 // corner counts are even for rectilinear notched rectangles
    };
    let notch_count = (corners.max(4) - 4) / 2;

    // Notch sizes per base corner (BL, BR, TR, TL); zero means no notch.
    let mut notches = [[0.0f64; 2]; 4];
    let mut slots: Vec<usize> = (0..4).collect();
    for _ in 0..notch_count {
        let k = rng.gen_range(0..slots.len());
        let corner = slots.remove(k);
        notches[corner] = [
            rng.gen_range(0.15..0.45) * width,
            rng.gen_range(0.15..0.45) * height,
        ];
    }

    let footprint = notched_rectangle(width, height, &notches);

    // Core region guaranteed inside the footprint: clear of every notch.
    let margin = 0.08 * width.min(height);
    let core = Rect {
        min: [
            notches[0][0].max(notches[3][0]) + margin,
            notches[0][1].max(notches[1][1]) + margin,
        ],
        max: [
            width - notches[1][0].max(notches[2][0]) - margin,
            height - notches[2][1].max(notches[3][1]) - margin,
        ],
    };
    if core.width() < 1.0 || core.height() < 1.0 {
        return None;
    }

    let room_count = rng.gen_range(cfg.room_count_range.clone());
    let rooms = split_rooms(core, room_count, margin * 0.5, rng)?;

    Some(Layout2D { footprint, rooms })
}

/// CCW boundary of a width x height rectangle with the given corner
/// notches. Each notched corner contributes three points (one reflex).
fn notched_rectangle(width: f64, height: f64, notches: &[[f64; 2]; 4]) -> Vec<[f64; 2]> {
    let mut pts = Vec::new();
    let [w0, h0] = notches[0]; // bottom-left
    let [w1, h1] = notches[1]; // bottom-right
    let [w2, h2] = notches[2]; // top-right
    let [w3, h3] = notches[3]; // top-left

    if w0 > 0.0 {
        pts.extend([[0.0, h0], [w0, h0], [w0, 0.0]]);
    } else {
        pts.push([0.0, 0.0]);
    }
    if w1 > 0.0 {
        pts.extend([[width - w1, 0.0], [width - w1, h1], [width, h1]]);
    } else {
        pts.push([width, 0.0]);
    }
    if w2 > 0.0 {
        pts.extend([[width, height - h2], [width - w2, height - h2], [width - w2, height]]);
    } else {
        pts.push([width, height]);
    }
    if w3 > 0.0 {
        pts.extend([[w3, height], [w3, height - h3], [0.0, height - h3]]);
    } else {
        pts.push([0.0, height]);
    }
    pts
}

/// Recursively splits `core` into `count` cells along alternating longest
/// axes, then shrinks each cell by `gap` so room interiors are strictly
/// disjoint and strictly inside the core.
fn split_rooms(core: Rect, count: usize, gap: f64, rng: &mut ChaCha8Rng) -> Option<Vec<Rect>> {
    if count == 0 {
        return Some(Vec::new());
    }
    let mut cells = vec![core];
    while cells.len() < count {
        // Split the largest cell.
        let idx = cells
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.area().partial_cmp(&b.1.area()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let cell = cells.swap_remove(idx);
        let t = rng.gen_range(0.35..0.65);
        let (a, b) = if cell.width() >= cell.height() {
            let x = cell.min[0] + t * cell.width();
            (
                Rect { min: cell.min, max: [x, cell.max[1]] },
                Rect { min: [x, cell.min[1]], max: cell.max },
            )
        } else {
            let y = cell.min[1] + t * cell.height();
            (
                Rect { min: cell.min, max: [cell.max[0], y] },
                Rect { min: [cell.min[0], y], max: cell.max },
            )
        };
        cells.push(a);
        cells.push(b);
    }
    let mut rooms = Vec::with_capacity(count);
    for cell in cells {
        let room = Rect {
            min: [cell.min[0] + gap, cell.min[1] + gap],
            max: [cell.max[0] - gap, cell.max[1] - gap],
        };
        if room.width() < 0.4 || room.height() < 0.4 {
            return None;
        }
        rooms.push(room);
    }
    Some(rooms)
}
