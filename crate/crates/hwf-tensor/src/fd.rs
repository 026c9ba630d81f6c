//! Central finite-difference gradient checking. This is the independent
//! oracle the tests compare every analytic backward pass against; keep it
//! free of any dependence on [`crate::Graph`] internals.

use std::collections::HashMap;

use ndarray::Array2;

use crate::graph::Gradients;
use crate::params::{Binding, ParamStore};

/// Extracts per-parameter gradients by name, substituting zeros for
/// parameters the loss did not touch.
pub fn grads_by_name(
    store: &ParamStore,
    binding: &Binding,
    grads: &Gradients,
) -> HashMap<String, Array2<f64>> {
    let mut out = HashMap::new();
    for ((name, value), &var) in store.iter().zip(binding.vars_in_order()) {
        let g = grads
            .get(var)
            .cloned()
            .unwrap_or_else(|| Array2::zeros(value.dim()));
        out.insert(name.to_string(), g);
    }
    out
}

/// Central difference of `eval` w.r.t. one parameter entry.
pub fn numeric_grad<F>(
    store: &mut ParamStore,
    name: &str,
    entry: (usize, usize),
    h: f64,
    eval: &F,
) -> f64
where
    F: Fn(&ParamStore) -> f64,
{
    let orig = store.get(name).unwrap()[entry];
    store.get_mut(name).unwrap()[entry] = orig + h;
    let up = eval(store);
    store.get_mut(name).unwrap()[entry] = orig - h;
    let down = eval(store);
    store.get_mut(name).unwrap()[entry] = orig;
    (up - down) / (2.0 * h)
}

/// Compares analytic gradients against central differences on up to
/// `max_entries` deterministically strided entries per parameter.
/// An entry passes when `|ga - gn| <= tol * max(1, |ga|, |gn|)`.
pub fn check<F>(
    store: &mut ParamStore,
    analytic: &HashMap<String, Array2<f64>>,
    eval: F,
    h: f64,
    tol: f64,
    max_entries: usize,
) -> Result<(), String>
where
    F: Fn(&ParamStore) -> f64,
{
    let names: Vec<String> = store.names().map(String::from).collect();
    for name in &names {
        let ga = analytic
            .get(name)
            .ok_or_else(|| format!("no analytic gradient for `{name}`"))?
            .clone();
        let (rows, cols) = ga.dim();
        let total = rows * cols;
        let count = total.min(max_entries);
        for k in 0..count {
            let flat = k * total / count;
            let entry = (flat / cols, flat % cols);
            let gn = numeric_grad(store, name, entry, h, &eval);
            let gav = ga[entry];
            let err = (gav - gn).abs();
            let bound = tol * gav.abs().max(gn.abs()).max(1.0);
            if err > bound {
                return Err(format!(
                    "gradient mismatch for `{name}`[{},{}]: analytic {gav}, numeric {gn}, err {err}",
                    entry.0, entry.1
                ));
            }
        }
    }
    Ok(())
}
