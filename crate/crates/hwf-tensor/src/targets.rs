//! Smoothed one-hot coordinate targets: a truncated discrete Gaussian over
//! the 128 coordinate bins, centered on the true bin, clipped at the edges
//! and renormalized to sum to one. `sigma` is measured in bins; zero
//! degenerates to an exact one-hot.

pub fn smoothed_coordinate_targets(bin: usize, sigma: f64, bins: usize) -> Vec<f64> {
    assert!(bin < bins, "target bin {bin} out of range");
    let mut w = vec![0.0; bins];
    if sigma <= 0.0 {
        w[bin] = 1.0;
        return w;
    }
    let support = (3.0 * sigma).ceil() as isize;
    let center = bin as isize;
    for k in (center - support)..=(center + support) {
        if k < 0 || k >= bins as isize {
            continue;
        }
        let d = (k - center) as f64;
        w[k as usize] = (-d * d / (2.0 * sigma * sigma)).exp();
    }
    let total: f64 = w.iter().sum();
    for e in &mut w {
        *e /= total;
    }
    w
}
