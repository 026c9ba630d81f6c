//! Per-segment geometric features, discretized to integers in [0, 128).
//!
//! Feature layout per segment (16 values):
//! endpoint A xyz, endpoint B xyz, length, direction xyz, midpoint xyz,
//! adjacent-angle min/mean/max in degrees. Endpoint A is the endpoint with
//! the lower canonical vertex index; the direction is the unit vector A->B.

use crate::error::WireframeError;
use crate::graph::SegmentGraph;
use crate::wireframe::Wireframe;

pub const FEATURE_COUNT: usize = 16;
pub const COORD_BINS: usize = 128;
/// Largest possible segment length inside [-1, 1]^3 (the cube diagonal).
pub const LENGTH_MAX: f64 = 3.4641016151377544; // 2 * sqrt(3)
pub const ANGLE_MAX_DEG: f64 = 180.0;

/// Discretized feature rows, one per segment in sequence order.
pub type SegmentFeatures = Vec<[u8; FEATURE_COUNT]>;

/// Half-open binning of `v` over [lo, hi] into 128 cells, with the top edge
/// clamped into the last cell so `v == hi` maps to 127.
pub fn quantize_unit(v: f64, lo: f64, hi: f64) -> u8 {
    let t = ((v - lo) / (hi - lo) * COORD_BINS as f64).floor();
    t.clamp(0.0, (COORD_BINS - 1) as f64) as u8
}

/// Center of coordinate bin `b` over [-1, 1]: -1 + (b + 0.5) / 64.
pub fn bin_center(b: u8) -> f64 {
    (b as f64 + 0.5) / (COORD_BINS as f64 / 2.0) - 1.0
}

fn quantize_coord(v: f64) -> u8 {
    quantize_unit(v, -1.0, 1.0)
}

/// Extracts the 16 discretized features for every segment of a normalized,
/// sequenced wireframe. The graph must describe the same segment order.
pub fn extract_features(
    w: &Wireframe,
    g: &SegmentGraph,
) -> Result<SegmentFeatures, WireframeError> {
    let mut rows = Vec::with_capacity(w.segment_count());
    for si in 0..w.segment_count() {
        let (pa, pb) = w.segment_points(si);
        let d = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
        let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if len == 0.0 {
            return Err(WireframeError::ZeroLengthSegment { segment: si });
        }
        let dir = [d[0] / len, d[1] / len, d[2] / len];
        let mid = [
            (pa[0] + pb[0]) * 0.5,
            (pa[1] + pb[1]) * 0.5,
            (pa[2] + pb[2]) * 0.5,
        ];

        let mut row = [0u8; FEATURE_COUNT];
        for k in 0..3 {
            row[k] = quantize_coord(pa[k]);
            row[3 + k] = quantize_coord(pb[k]);
        }
        row[6] = quantize_unit(len, 0.0, LENGTH_MAX);
        for k in 0..3 {
            row[7 + k] = quantize_unit(dir[k], -1.0, 1.0);
            row[10 + k] = quantize_coord(mid[k]);
        }

        let angles = adjacent_angles(w, g, si)?;
        if !angles.is_empty() {
            let min = angles.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = angles.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mean = angles.iter().sum::<f64>() / angles.len() as f64;
            row[13] = quantize_unit(min, 0.0, ANGLE_MAX_DEG);
            row[14] = quantize_unit(mean, 0.0, ANGLE_MAX_DEG);
            row[15] = quantize_unit(max, 0.0, ANGLE_MAX_DEG);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Angles in degrees between segment `si` and each adjacent segment,
/// measured between the rays leaving their shared junction.
fn adjacent_angles(
    w: &Wireframe,
    g: &SegmentGraph,
    si: usize,
) -> Result<Vec<f64>, WireframeError> {
    let (a, b) = w.segments()[si];
    let mut angles = Vec::with_capacity(g.degree(si));
    for &sj in g.neighbors(si) {
        let (c, d) = w.segments()[sj];
        let shared = if c == a || c == b { c } else { d };
        let other_i = if shared == a { b } else { a };
        let other_j = if shared == c { d } else { c };
        let u = ray(w, shared, other_i, si)?;
        let v = ray(w, shared, other_j, sj)?;
        let dot = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0);
        angles.push(dot.acos().to_degrees());
    }
    Ok(angles)
}

fn ray(w: &Wireframe, from: usize, to: usize, segment: usize) -> Result<[f64; 3], WireframeError> {
    let p = w.vertices()[from];
    let q = w.vertices()[to];
    let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if n == 0.0 {
        return Err(WireframeError::ZeroLengthSegment { segment });
    }
    Ok([d[0] / n, d[1] / n, d[2] / n])
}
