//! Residual lookup-free quantization.
//!
//! Each depth level quantizes the running residual componentwise to
//! `scale_d * sign(r)`, with the code index read directly off the sign bits
//! (no codebook search). The commit loss pulls pre-quantization values
//! toward their (gradient-detached) quantized counterparts; the entropy
//! penalty rewards confident per-sample bits and uniform batch usage,
//! computed bitwise from the independent-Bernoulli view of the code
//! distribution.

use std::rc::Rc;

use hwf_tensor::{Graph, Var};
use ndarray::Array2;

use crate::error::ModelError;

/// Componentwise sign with sign(0) = -1. Errors on non-finite input.
pub fn lfq_sign(z: &[f64]) -> Result<Vec<f64>, ModelError> {
    if let Some(bad) = z.iter().find(|v| !v.is_finite()) {
        return Err(ModelError::InvalidTokens(format!(
            "non-finite component {bad} in quantizer input"
        )));
    }
    Ok(z.iter().map(|&v| if v > 0.0 { 1.0 } else { -1.0 }).collect())
}

/// Little-endian positive-bit code index: sum of 2^(i-1) over dimensions i
/// with z_i > 0.
pub fn lfq_index(z: &[f64]) -> u32 {
    z.iter()
        .enumerate()
        .map(|(i, &v)| if v > 0.0 { 1u32 << i } else { 0 })
        .sum()
}

/// Inverse of [`lfq_index`]: the +-1 code vector for an index.
pub fn code_vector(index: u32, bits: usize) -> Vec<f64> {
    (0..bits)
        .map(|i| if index >> i & 1 == 1 { 1.0 } else { -1.0 })
        .collect()
}

/// Quantizer parameter vars for one forward pass.
pub struct QuantizerVars {
    pub proj_in_w: Var,
    pub proj_in_b: Var,
    pub proj_out_w: Var,
    pub proj_out_b: Var,
    /// One learnable positive scale per depth.
    pub scales: Vec<Var>,
}

/// Whether the bottleneck actually quantizes. `Bypass` keeps the exact
/// same computation with the sign step replaced by identity, giving a
/// smooth surrogate for end-to-end finite-difference checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizeMode {
    Quantized,
    Bypass,
}

pub struct QuantizeOutput {
    /// Reconstructed latents, one row per input row.
    pub reconstructed: Var,
    /// Mean over depths of the mean squared pre-quantization gap.
    pub commit_loss: Var,
    /// Mean over depths of (mean per-sample bit entropy - batch entropy).
    pub entropy_penalty: Var,
    /// Per input row, one code index per depth.
    pub indices: Vec<Vec<u32>>,
}

const CLAMP_EPS: f64 = 1e-12;

/// Binary entropy of probabilities, affinely clamped away from {0, 1}.
fn binary_entropy(g: &mut Graph, q: Var) -> Var {
    let q = g.scale(q, 1.0 - 2.0 * CLAMP_EPS);
    let q = g.shift(q, CLAMP_EPS);
    let ln_q = g.ln(q);
    let neg = g.scale(q, -1.0);
    let one_minus = g.shift(neg, 1.0);
    let ln_1mq = g.ln(one_minus);
    let t1 = g.mul(q, ln_q);
    let t2 = g.mul(one_minus, ln_1mq);
    let s = g.add(t1, t2);
    g.scale(s, -1.0)
}

/// Residual LFQ over row-wise latents: project in, peel `depth` code
/// layers off the residual, sum the quantized codes, and project back out.
pub fn residual_quantize(
    g: &mut Graph,
    latents: Var,
    vars: &QuantizerVars,
    mode: QuantizeMode,
) -> QuantizeOutput {
    let depth = vars.scales.len();
    let rows = g.value(latents).nrows();
    let bits = g.value(vars.proj_in_w).ncols();

    let pre = g.matmul(latents, vars.proj_in_w);
    let mut residual = g.add_row(pre, vars.proj_in_b);

    let mut indices = vec![Vec::with_capacity(depth); rows];
    let mut code_sum: Option<Var> = None;
    let mut commit_terms = Vec::with_capacity(depth);
    let mut entropy_terms = Vec::with_capacity(depth);

    for d in 0..depth {
        for (row, idx) in g.value(residual).rows().into_iter().zip(indices.iter_mut()) {
            idx.push(lfq_index(row.as_slice().unwrap()));
        }

        let direction = match mode {
            QuantizeMode::Quantized => g.sign_st(residual),
            QuantizeMode::Bypass => residual,
        };
        let code = g.scale_by(direction, vars.scales[d]);

        let detached = g.detach(code);
        let gap = g.sub(residual, detached);
        let sq = g.mul(gap, gap);
        commit_terms.push(g.mean(sq));

        let q = g.sigmoid(residual);
        let h = binary_entropy(g, q);
        let mean_h = g.mean(h);
        let per_sample = g.scale(mean_h, bits as f64);
        let q_bar = g.mean_rows(q);
        let h_bar = binary_entropy(g, q_bar);
        let batch = g.sum(h_bar);
        entropy_terms.push(g.sub(per_sample, batch));

        residual = g.sub(residual, code);
        code_sum = Some(match code_sum {
            Some(acc) => g.add(acc, code),
            None => code,
        });
        let _ = d;
    }

    let summed = code_sum.expect("depth >= 1");
    let out = g.matmul(summed, vars.proj_out_w);
    let reconstructed = g.add_row(out, vars.proj_out_b);

    let commit_loss = mean_of(g, &commit_terms);
    let entropy_penalty = mean_of(g, &entropy_terms);
    QuantizeOutput { reconstructed, commit_loss, entropy_penalty, indices }
}

fn mean_of(g: &mut Graph, terms: &[Var]) -> Var {
    let mut acc = terms[0];
    for &t in &terms[1..] {
        acc = g.add(acc, t);
    }
    g.scale(acc, 1.0 / terms.len() as f64)
}

/// Per-vertex lists of incident segments, for distributing segment
/// features onto vertices.
pub fn vertex_groups(segments: &[(usize, usize)], vertex_count: usize) -> Rc<Vec<Vec<usize>>> {
    let mut groups = vec![Vec::new(); vertex_count];
    for (si, &(a, b)) in segments.iter().enumerate() {
        groups[a].push(si);
        groups[b].push(si);
    }
    Rc::new(groups)
}

/// Stacks per-vertex rows back onto segments: each segment row is the
/// concatenation of its endpoint A and endpoint B rows.
pub fn stack_endpoints(
    g: &mut Graph,
    vertex_rows: Var,
    segments: &[(usize, usize)],
) -> Var {
    let a_idx: Rc<Vec<usize>> = Rc::new(segments.iter().map(|&(a, _)| a).collect());
    let b_idx: Rc<Vec<usize>> = Rc::new(segments.iter().map(|&(_, b)| b).collect());
    let a = g.gather_rows(vertex_rows, a_idx);
    let b = g.gather_rows(vertex_rows, b_idx);
    g.concat_cols(&[a, b])
}

/// Orders vertex code stacks into the flat token sequence: per segment,
/// endpoint A's depth codes then endpoint B's.
pub fn codes_to_tokens(indices: &[Vec<u32>], segments: &[(usize, usize)]) -> Vec<u32> {
    let depth = indices.first().map(Vec::len).unwrap_or(0);
    let mut tokens = Vec::with_capacity(segments.len() * 2 * depth);
    for &(a, b) in segments {
        tokens.extend_from_slice(&indices[a]);
        tokens.extend_from_slice(&indices[b]);
    }
    tokens
}
