//! Reverse-mode autodiff over a flat tape of 2D `f64` tensors.
//!
//! Each operation appends a node holding its value and its input ids; the
//! backward pass walks the tape once in reverse, accumulating gradients for
//! every node that (transitively) depends on a parameter leaf.

use std::rc::Rc;

use ndarray::{s, Array2, Axis};

/// Handle to a node in a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    Matmul(usize, usize),
    Transpose(usize),
    Add(usize, usize),
    AddRow(usize, usize),
    Mul(usize, usize),
    ScaleBy(usize, usize),
    Scale(usize, f64),
    Shift(usize, f64),
    Sum(usize),
    Mean(usize),
    MeanRows(usize),
    Relu(usize),
    Gelu(usize),
    Sigmoid(usize),
    Ln(usize),
    Softmax(usize),
    LogSoftmax(usize),
    LayerNorm { x: usize, gamma: usize, beta: usize },
    GatherRows { src: usize, idx: Rc<Vec<usize>> },
    ScatterMean { src: usize, groups: Rc<Vec<Vec<usize>>> },
    ConcatRows(Vec<usize>),
    ConcatCols(Vec<usize>),
    SliceRows { src: usize, start: usize, len: usize },
    SliceCols { src: usize, start: usize, len: usize },
    SignSt(usize),
    Detach(usize),
}

struct Node {
    value: Array2<f64>,
    op: Op,
    needs_grad: bool,
}

const LN_EPS: f64 = 1e-5;

/// Computation tape. Build values with the op methods, then call
/// [`Graph::backward`] on a scalar node.
#[derive(Default)]
pub struct Graph {
    nodes: Vec<Node>,
}

impl Graph {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    fn push(&mut self, value: Array2<f64>, op: Op, needs_grad: bool) -> Var {
        debug_assert!(value.iter().all(|v| v.is_finite()), "non-finite value in graph");
        self.nodes.push(Node { value, op, needs_grad });
        Var(self.nodes.len() - 1)
    }

    fn ng(&self, v: Var) -> bool {
        self.nodes[v.0].needs_grad
    }

    /// Constant leaf; gradients do not flow into it.
    pub fn constant(&mut self, value: Array2<f64>) -> Var {
        self.push(value, Op::Leaf, false)
    }

    /// Parameter leaf; gradients are accumulated for it.
    pub fn param(&mut self, value: Array2<f64>) -> Var {
        self.push(value, Op::Leaf, true)
    }

    pub fn scalar(&mut self, v: f64) -> Var {
        self.constant(Array2::from_elem((1, 1), v))
    }

    pub fn value(&self, v: Var) -> &Array2<f64> {
        &self.nodes[v.0].value
    }

    pub fn scalar_value(&self, v: Var) -> f64 {
        let a = self.value(v);
        debug_assert_eq!(a.len(), 1);
        a[(0, 0)]
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a).dot(self.value(b));
        let needs = self.ng(a) || self.ng(b);
        self.push(v, Op::Matmul(a.0, b.0), needs)
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        let v = self.value(a).t().to_owned();
        let needs = self.ng(a);
        self.push(v, Op::Transpose(a.0), needs)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.value(a).dim(), self.value(b).dim(), "add shape mismatch");
        let v = self.value(a) + self.value(b);
        let needs = self.ng(a) || self.ng(b);
        self.push(v, Op::Add(a.0, b.0), needs)
    }

    /// (R, C) + (1, C), broadcast over rows.
    pub fn add_row(&mut self, a: Var, row: Var) -> Var {
        assert_eq!(self.value(row).nrows(), 1, "add_row expects a single row");
        assert_eq!(self.value(a).ncols(), self.value(row).ncols(), "add_row width");
        let v = self.value(a) + &self.value(row).row(0);
        let needs = self.ng(a) || self.ng(row);
        self.push(v, Op::AddRow(a.0, row.0), needs)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.value(a).dim(), self.value(b).dim(), "mul shape mismatch");
        let v = self.value(a) * self.value(b);
        let needs = self.ng(a) || self.ng(b);
        self.push(v, Op::Mul(a.0, b.0), needs)
    }

    /// Multiply by a 1 x 1 tensor (for learnable scalar scales).
    pub fn scale_by(&mut self, a: Var, s: Var) -> Var {
        assert_eq!(self.value(s).len(), 1, "scale_by expects a scalar tensor");
        let v = self.value(a) * self.scalar_value(s);
        let needs = self.ng(a) || self.ng(s);
        self.push(v, Op::ScaleBy(a.0, s.0), needs)
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let v = self.value(a) * c;
        let needs = self.ng(a);
        self.push(v, Op::Scale(a.0, c), needs)
    }

    pub fn shift(&mut self, a: Var, c: f64) -> Var {
        let v = self.value(a) + c;
        let needs = self.ng(a);
        self.push(v, Op::Shift(a.0, c), needs)
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let nb = self.scale(b, -1.0);
        self.add(a, nb)
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let v = Array2::from_elem((1, 1), self.value(a).sum());
        let needs = self.ng(a);
        self.push(v, Op::Sum(a.0), needs)
    }

    pub fn mean(&mut self, a: Var) -> Var {
        let v = Array2::from_elem((1, 1), self.value(a).mean().unwrap());
        let needs = self.ng(a);
        self.push(v, Op::Mean(a.0), needs)
    }

    /// Column means: (R, C) -> (1, C).
    pub fn mean_rows(&mut self, a: Var) -> Var {
        let m = self.value(a).mean_axis(Axis(0)).unwrap();
        let v = m.insert_axis(Axis(0));
        let needs = self.ng(a);
        self.push(v, Op::MeanRows(a.0), needs)
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(|x| x.max(0.0));
        let needs = self.ng(a);
        self.push(v, Op::Relu(a.0), needs)
    }

    pub fn gelu(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(gelu_fwd);
        let needs = self.ng(a);
        self.push(v, Op::Gelu(a.0), needs)
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(|x| 1.0 / (1.0 + (-x).exp()));
        let needs = self.ng(a);
        self.push(v, Op::Sigmoid(a.0), needs)
    }

    pub fn ln(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(f64::ln);
        let needs = self.ng(a);
        self.push(v, Op::Ln(a.0), needs)
    }

    /// Row-wise softmax.
    pub fn softmax(&mut self, a: Var) -> Var {
        let v = rowwise_softmax(self.value(a));
        let needs = self.ng(a);
        self.push(v, Op::Softmax(a.0), needs)
    }

    /// Row-wise log-softmax.
    pub fn log_softmax(&mut self, a: Var) -> Var {
        let x = self.value(a);
        let mut v = x.clone();
        for mut row in v.rows_mut() {
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            row.mapv_inplace(|e| e - max);
            let lse = row.iter().map(|e| e.exp()).sum::<f64>().ln();
            row.mapv_inplace(|e| e - lse);
        }
        let needs = self.ng(a);
        self.push(v, Op::LogSoftmax(a.0), needs)
    }

    /// Row-wise layer normalization with learnable 1 x C gain and bias.
    pub fn layer_norm(&mut self, x: Var, gamma: Var, beta: Var) -> Var {
        let xv = self.value(x);
        let c = xv.ncols();
        assert_eq!(self.value(gamma).dim(), (1, c), "layer_norm gamma shape");
        assert_eq!(self.value(beta).dim(), (1, c), "layer_norm beta shape");
        let mut v = xv.clone();
        for mut row in v.rows_mut() {
            let mu = row.mean().unwrap();
            let var = row.iter().map(|e| (e - mu) * (e - mu)).sum::<f64>() / c as f64;
            let inv = 1.0 / (var + LN_EPS).sqrt();
            row.mapv_inplace(|e| (e - mu) * inv);
        }
        let v = &v * &self.value(gamma).row(0) + &self.value(beta).row(0);
        let needs = self.ng(x) || self.ng(gamma) || self.ng(beta);
        self.push(v, Op::LayerNorm { x: x.0, gamma: gamma.0, beta: beta.0 }, needs)
    }

    /// Row gather; also the embedding lookup.
    pub fn gather_rows(&mut self, src: Var, idx: Rc<Vec<usize>>) -> Var {
        let sv = self.value(src);
        let mut v = Array2::zeros((idx.len(), sv.ncols()));
        for (r, &i) in idx.iter().enumerate() {
            v.row_mut(r).assign(&sv.row(i));
        }
        let needs = self.ng(src);
        self.push(v, Op::GatherRows { src: src.0, idx }, needs)
    }

    /// Group means of rows: output row g is the mean of `src` rows in
    /// `groups[g]` (zeros for an empty group).
    pub fn scatter_mean(&mut self, src: Var, groups: Rc<Vec<Vec<usize>>>) -> Var {
        let sv = self.value(src);
        let mut v = Array2::zeros((groups.len(), sv.ncols()));
        for (g, members) in groups.iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            for &i in members {
                let row = sv.row(i);
                v.row_mut(g).zip_mut_with(&row, |a, b| *a += b);
            }
            v.row_mut(g).mapv_inplace(|a| a / members.len() as f64);
        }
        let needs = self.ng(src);
        self.push(v, Op::ScatterMean { src: src.0, groups }, needs)
    }

    pub fn concat_rows(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty());
        let cols = self.value(parts[0]).ncols();
        let rows: usize = parts.iter().map(|&p| self.value(p).nrows()).sum();
        let mut v = Array2::zeros((rows, cols));
        let mut at = 0;
        for &p in parts {
            let pv = self.value(p);
            v.slice_mut(s![at..at + pv.nrows(), ..]).assign(pv);
            at += pv.nrows();
        }
        let needs = parts.iter().any(|&p| self.ng(p));
        self.push(v, Op::ConcatRows(parts.iter().map(|p| p.0).collect()), needs)
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty());
        let rows = self.value(parts[0]).nrows();
        let cols: usize = parts.iter().map(|&p| self.value(p).ncols()).sum();
        let mut v = Array2::zeros((rows, cols));
        let mut at = 0;
        for &p in parts {
            let pv = self.value(p);
            v.slice_mut(s![.., at..at + pv.ncols()]).assign(pv);
            at += pv.ncols();
        }
        let needs = parts.iter().any(|&p| self.ng(p));
        self.push(v, Op::ConcatCols(parts.iter().map(|p| p.0).collect()), needs)
    }

    pub fn slice_rows(&mut self, src: Var, start: usize, len: usize) -> Var {
        let v = self.value(src).slice(s![start..start + len, ..]).to_owned();
        let needs = self.ng(src);
        self.push(v, Op::SliceRows { src: src.0, start, len }, needs)
    }

    pub fn slice_cols(&mut self, src: Var, start: usize, len: usize) -> Var {
        let v = self.value(src).slice(s![.., start..start + len]).to_owned();
        let needs = self.ng(src);
        self.push(v, Op::SliceCols { src: src.0, start, len }, needs)
    }

    /// Componentwise sign quantization, -1 for non-positive entries, with a
    /// straight-through backward pass (identity Jacobian).
    pub fn sign_st(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(|x| if x > 0.0 { 1.0 } else { -1.0 });
        let needs = self.ng(a);
        self.push(v, Op::SignSt(a.0), needs)
    }

    /// Value copy that blocks gradient flow.
    pub fn detach(&mut self, a: Var) -> Var {
        let v = self.value(a).clone();
        self.push(v, Op::Detach(a.0), false)
    }

    /// Reverse pass from a scalar node. Returns per-node gradients; read
    /// them with [`Gradients::get`].
    pub fn backward(&self, loss: Var) -> Gradients {
        assert_eq!(self.value(loss).len(), 1, "backward needs a scalar loss");
        let mut grads: Vec<Option<Array2<f64>>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(Array2::from_elem((1, 1), 1.0));

        for id in (0..=loss.0).rev() {
            let Some(g) = grads[id].take() else { continue };
            let node = &self.nodes[id];
            if !node.needs_grad {
                grads[id] = Some(g);
                continue;
            }
            self.propagate(id, &g, &mut grads);
            grads[id] = Some(g);
        }
        Gradients { by_node: grads }
    }

    fn propagate(&self, id: usize, g: &Array2<f64>, grads: &mut Vec<Option<Array2<f64>>>) {
        let node = &self.nodes[id];
        {
            match &node.op {
                Op::Leaf => {}
                Op::Matmul(a, b) => {
                    let ga = g.dot(&self.nodes[*b].value.t());
                    let gb = self.nodes[*a].value.t().dot(g);
                    accumulate(grads, *a, ga, &self.nodes);
                    accumulate(grads, *b, gb, &self.nodes);
                }
                Op::Transpose(a) => {
                    accumulate(grads, *a, g.t().to_owned(), &self.nodes);
                }
                Op::Add(a, b) => {
                    accumulate(grads, *a, g.clone(), &self.nodes);
                    accumulate(grads, *b, g.clone(), &self.nodes);
                }
                Op::AddRow(a, row) => {
                    accumulate(grads, *a, g.clone(), &self.nodes);
                    let gr = g.sum_axis(Axis(0)).insert_axis(Axis(0));
                    accumulate(grads, *row, gr, &self.nodes);
                }
                Op::Mul(a, b) => {
                    let ga = g * &self.nodes[*b].value;
                    let gb = g * &self.nodes[*a].value;
                    accumulate(grads, *a, ga, &self.nodes);
                    accumulate(grads, *b, gb, &self.nodes);
                }
                Op::ScaleBy(a, sid) => {
                    let sval = self.nodes[*sid].value[(0, 0)];
                    accumulate(grads, *a, g * sval, &self.nodes);
                    let gs = (g * &self.nodes[*a].value).sum();
                    accumulate(grads, *sid, Array2::from_elem((1, 1), gs), &self.nodes);
                }
                Op::Scale(a, c) => {
                    accumulate(grads, *a, g * *c, &self.nodes);
                }
                Op::Shift(a, _) => {
                    accumulate(grads, *a, g.clone(), &self.nodes);
                }
                Op::Sum(a) => {
                    let shape = self.nodes[*a].value.dim();
                    accumulate(grads, *a, Array2::from_elem(shape, g[(0, 0)]), &self.nodes);
                }
                Op::Mean(a) => {
                    let shape = self.nodes[*a].value.dim();
                    let scale = g[(0, 0)] / self.nodes[*a].value.len() as f64;
                    accumulate(grads, *a, Array2::from_elem(shape, scale), &self.nodes);
                }
                Op::MeanRows(a) => {
                    let (r, c) = self.nodes[*a].value.dim();
                    let mut ga = Array2::zeros((r, c));
                    for mut row in ga.rows_mut() {
                        row.assign(&(&g.row(0) / r as f64));
                    }
                    accumulate(grads, *a, ga, &self.nodes);
                }
                Op::Relu(a) => {
                    let mask = self.nodes[*a].value.mapv(|x| if x > 0.0 { 1.0 } else { 0.0 });
                    accumulate(grads, *a, g * &mask, &self.nodes);
                }
                Op::Gelu(a) => {
                    let d = self.nodes[*a].value.mapv(gelu_bwd);
                    accumulate(grads, *a, g * &d, &self.nodes);
                }
                Op::Sigmoid(a) => {
                    let y = &node.value;
                    let d = y.mapv(|s| s * (1.0 - s));
                    accumulate(grads, *a, g * &d, &self.nodes);
                }
                Op::Ln(a) => {
                    let ga = g / &self.nodes[*a].value;
                    accumulate(grads, *a, ga, &self.nodes);
                }
                Op::Softmax(a) => {
                    let y = &node.value;
                    let mut ga = Array2::zeros(y.dim());
                    for r in 0..y.nrows() {
                        let yr = y.row(r);
                        let gr = g.row(r);
                        let dot = yr.iter().zip(gr).map(|(a, b)| a * b).sum::<f64>();
                        for c in 0..y.ncols() {
                            ga[(r, c)] = yr[c] * (gr[c] - dot);
                        }
                    }
                    accumulate(grads, *a, ga, &self.nodes);
                }
                Op::LogSoftmax(a) => {
                    let y = &node.value;
                    let mut ga = Array2::zeros(y.dim());
                    for r in 0..y.nrows() {
                        let gsum = g.row(r).sum();
                        for c in 0..y.ncols() {
                            ga[(r, c)] = g[(r, c)] - y[(r, c)].exp() * gsum;
                        }
                    }
                    accumulate(grads, *a, ga, &self.nodes);
                }
                Op::LayerNorm { x, gamma, beta } => {
                    let xv = &self.nodes[*x].value;
                    let (r, c) = xv.dim();
                    let gv = self.nodes[*gamma].value.row(0).to_owned();
                    let mut gx = Array2::zeros((r, c));
                    let mut ggamma = Array2::zeros((1, c));
                    let mut gbeta = Array2::zeros((1, c));
                    for i in 0..r {
                        let row = xv.row(i);
                        let mu = row.mean().unwrap();
                        let var = row.iter().map(|e| (e - mu) * (e - mu)).sum::<f64>() / c as f64;
                        let inv = 1.0 / (var + LN_EPS).sqrt();
                        let xhat: Vec<f64> = row.iter().map(|e| (e - mu) * inv).collect();
                        let gr = g.row(i);
                        let mut dxhat = vec![0.0; c];
                        for j in 0..c {
                            dxhat[j] = gr[j] * gv[j];
                            ggamma[(0, j)] += gr[j] * xhat[j];
                            gbeta[(0, j)] += gr[j];
                        }
                        let mean_dx = dxhat.iter().sum::<f64>() / c as f64;
                        let mean_dx_xhat =
                            dxhat.iter().zip(&xhat).map(|(a, b)| a * b).sum::<f64>() / c as f64;
                        for j in 0..c {
                            gx[(i, j)] = inv * (dxhat[j] - mean_dx - xhat[j] * mean_dx_xhat);
                        }
                    }
                    accumulate(grads, *x, gx, &self.nodes);
                    accumulate(grads, *gamma, ggamma, &self.nodes);
                    accumulate(grads, *beta, gbeta, &self.nodes);
                }
                Op::GatherRows { src, idx } => {
                    let shape = self.nodes[*src].value.dim();
                    let mut gs = Array2::zeros(shape);
                    for (r, &i) in idx.iter().enumerate() {
                        let grow = g.row(r);
                        gs.row_mut(i).zip_mut_with(&grow, |a, b| *a += b);
                    }
                    accumulate(grads, *src, gs, &self.nodes);
                }
                Op::ScatterMean { src, groups } => {
                    let shape = self.nodes[*src].value.dim();
                    let mut gs = Array2::zeros(shape);
                    for (grp, members) in groups.iter().enumerate() {
                        if members.is_empty() {
                            continue;
                        }
                        let w = 1.0 / members.len() as f64;
                        let grow = g.row(grp);
                        for &i in members {
                            gs.row_mut(i).zip_mut_with(&grow, |a, b| *a += b * w);
                        }
                    }
                    accumulate(grads, *src, gs, &self.nodes);
                }
                Op::ConcatRows(parts) => {
                    let mut at = 0;
                    for &p in parts {
                        let rows = self.nodes[p].value.nrows();
                        let gp = g.slice(s![at..at + rows, ..]).to_owned();
                        accumulate(grads, p, gp, &self.nodes);
                        at += rows;
                    }
                }
                Op::ConcatCols(parts) => {
                    let mut at = 0;
                    for &p in parts {
                        let cols = self.nodes[p].value.ncols();
                        let gp = g.slice(s![.., at..at + cols]).to_owned();
                        accumulate(grads, p, gp, &self.nodes);
                        at += cols;
                    }
                }
                Op::SliceRows { src, start, len } => {
                    let shape = self.nodes[*src].value.dim();
                    let mut gs = Array2::zeros(shape);
                    gs.slice_mut(s![*start..*start + *len, ..]).assign(g);
                    accumulate(grads, *src, gs, &self.nodes);
                }
                Op::SliceCols { src, start, len } => {
                    let shape = self.nodes[*src].value.dim();
                    let mut gs = Array2::zeros(shape);
                    gs.slice_mut(s![.., *start..*start + *len]).assign(g);
                    accumulate(grads, *src, gs, &self.nodes);
                }
                Op::SignSt(a) => {
                    // Straight-through: gradient passes unchanged.
                    accumulate(grads, *a, g.clone(), &self.nodes);
                }
                Op::Detach(_) => {}
            }
        }
    }
}

fn accumulate(grads: &mut [Option<Array2<f64>>], id: usize, g: Array2<f64>, nodes: &[Node]) {
    if !nodes[id].needs_grad {
        return;
    }
    match &mut grads[id] {
        Some(existing) => *existing += &g,
        slot @ None => *slot = Some(g),
    }
}

/// Per-node gradients from one backward pass.
pub struct Gradients {
    by_node: Vec<Option<Array2<f64>>>,
}

impl Gradients {
    pub fn get(&self, v: Var) -> Option<&Array2<f64>> {
        self.by_node.get(v.0).and_then(|g| g.as_ref())
    }
}

fn rowwise_softmax(x: &Array2<f64>) -> Array2<f64> {
    let mut v = x.clone();
    for mut row in v.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|e| (e - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|e| e / sum);
    }
    v
}

const GELU_C: f64 = 0.7978845608028654; // sqrt(2 / pi)
const GELU_A: f64 = 0.044715;

fn gelu_fwd(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + GELU_A * x * x * x)).tanh())
}

fn gelu_bwd(x: f64) -> f64 {
    let u = GELU_C * (x + GELU_A * x * x * x);
    let t = u.tanh();
    let sech2 = 1.0 - t * t;
    0.5 * (1.0 + t) + 0.5 * x * sech2 * GELU_C * (1.0 + 3.0 * GELU_A * x * x)
}
