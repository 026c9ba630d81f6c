//! Adaptive-moment optimizer with bias correction.

use ndarray::Array2;

use crate::params::ParamStore;

pub struct Adam {
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: u64,
    m: Vec<Array2<f64>>,
    v: Vec<Array2<f64>>,
}

impl Adam {
    pub fn new(store: &ParamStore, beta1: f64, beta2: f64, eps: f64) -> Self {
        let m = store.iter().map(|(_, p)| Array2::zeros(p.dim())).collect();
        let v = store.iter().map(|(_, p)| Array2::zeros(p.dim())).collect();
        Self { beta1, beta2, eps, step: 0, m, v }
    }

    /// One update. `grads` holds one gradient per parameter in registration
    /// order (zeros where a parameter did not participate).
    pub fn step(&mut self, store: &mut ParamStore, grads: &[Array2<f64>], lr: f64) {
        assert_eq!(grads.len(), store.len(), "gradient count mismatch");
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        let names: Vec<String> = store.names().map(String::from).collect();
        for (i, name) in names.iter().enumerate() {
            let g = &grads[i];
            let m = &mut self.m[i];
            m.zip_mut_with(g, |m, g| *m = self.beta1 * *m + (1.0 - self.beta1) * g);
            let v = &mut self.v[i];
            v.zip_mut_with(g, |v, g| *v = self.beta2 * *v + (1.0 - self.beta2) * g * g);
            let p = store.get_mut(name).expect("optimizer matches store");
            for ((p, m), v) in p.iter_mut().zip(m.iter()).zip(v.iter()) {
                let mhat = m / bc1;
                let vhat = v / bc2;
                *p -= lr * mhat / (vhat.sqrt() + self.eps);
            }
        }
    }
}
