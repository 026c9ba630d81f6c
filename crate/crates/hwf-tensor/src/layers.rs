//! Layer forwards over prepared parameter vars: linear maps, mean-neighbor
//! graph convolution, block-local multi-head attention, position-wise feed
//! forward, k=3 residual 1D convolution stacks, and summed feature
//! embeddings.

use std::rc::Rc;

use ndarray::Array2;

use crate::graph::{Graph, Var};

pub fn linear(g: &mut Graph, x: Var, w: Var, b: Var) -> Var {
    let y = g.matmul(x, w);
    g.add_row(y, b)
}

/// Mean-aggregation graph convolution:
/// `relu(x W_self + mean_{j in adj(i)} x_j W_neigh + b)`.
/// Isolated nodes see a zero neighbor mean.
pub fn graph_conv(
    g: &mut Graph,
    x: Var,
    adjacency: Rc<Vec<Vec<usize>>>,
    w_self: Var,
    w_neigh: Var,
    b: Var,
) -> Var {
    let own = g.matmul(x, w_self);
    let neigh = g.scatter_mean(x, adjacency);
    let neigh = g.matmul(neigh, w_neigh);
    let sum = g.add(own, neigh);
    let sum = g.add_row(sum, b);
    g.relu(sum)
}

pub struct AttentionParams {
    pub wq: Var,
    pub wk: Var,
    pub wv: Var,
    pub wo: Var,
    pub ln_gamma: Var,
    pub ln_beta: Var,
}

/// Multi-head scaled dot-product attention restricted to fixed
/// non-overlapping blocks of `window` positions, with residual connection
/// and layer norm around the attention. `window >= sequence length` makes
/// it full self-attention.
pub fn attention_block(
    g: &mut Graph,
    x: Var,
    p: &AttentionParams,
    heads: usize,
    window: usize,
    causal: bool,
) -> Var {
    let (rows, dim) = g.value(x).dim();
    assert!(window >= 1, "window must be at least 1");
    assert_eq!(dim % heads, 0, "feature dim must divide into heads");
    let head_dim = dim / heads;
    let scale = 1.0 / (head_dim as f64).sqrt();

    let q = g.matmul(x, p.wq);
    let k = g.matmul(x, p.wk);
    let v = g.matmul(x, p.wv);

    let mut block_outputs = Vec::new();
    let mut at = 0;
    while at < rows {
        let len = window.min(rows - at);
        let mut head_outputs = Vec::with_capacity(heads);
        let mask = causal.then(|| {
            let m = Array2::from_shape_fn((len, len), |(i, j)| {
                if j > i {
                    -1e30
                } else {
                    0.0
                }
            });
            g.constant(m)
        });
        for h in 0..heads {
            let qb = g.slice_rows(q, at, len);
            let qb = g.slice_cols(qb, h * head_dim, head_dim);
            let kb = g.slice_rows(k, at, len);
            let kb = g.slice_cols(kb, h * head_dim, head_dim);
            let vb = g.slice_rows(v, at, len);
            let vb = g.slice_cols(vb, h * head_dim, head_dim);

            let kt = g.transpose(kb);
            let scores = g.matmul(qb, kt);
            let mut scores = g.scale(scores, scale);
            if let Some(mask) = mask {
                scores = g.add(scores, mask);
            }
            let weights = g.softmax(scores);
            head_outputs.push(g.matmul(weights, vb));
        }
        block_outputs.push(g.concat_cols(&head_outputs));
        at += len;
    }
    let ctx = if block_outputs.len() == 1 {
        block_outputs[0]
    } else {
        g.concat_rows(&block_outputs)
    };
    let out = g.matmul(ctx, p.wo);
    let res = g.add(x, out);
    g.layer_norm(res, p.ln_gamma, p.ln_beta)
}

pub struct FeedForwardParams {
    pub w1: Var,
    pub b1: Var,
    pub w2: Var,
    pub b2: Var,
    pub ln_gamma: Var,
    pub ln_beta: Var,
}

/// Position-wise feed-forward with residual and layer norm.
pub fn feed_forward_block(g: &mut Graph, x: Var, p: &FeedForwardParams) -> Var {
    let h = linear(g, x, p.w1, p.b1);
    let h = g.gelu(h);
    let h = linear(g, h, p.w2, p.b2);
    let res = g.add(x, h);
    g.layer_norm(res, p.ln_gamma, p.ln_beta)
}

/// Width-3, stride-1, zero-padded 1D convolution over a (length, channels)
/// sequence. The kernel is a (3 * c_in, c_out) matrix whose row blocks are
/// the previous, current, and next taps.
pub fn conv1d_k3(g: &mut Graph, x: Var, w: Var, b: Var) -> Var {
    let (len, c_in) = g.value(x).dim();
    assert_eq!(g.value(w).nrows(), 3 * c_in, "conv kernel rows");
    let zero = g.constant(Array2::zeros((1, c_in)));
    let padded = g.concat_rows(&[x, zero]);
    let prev_idx: Vec<usize> = (0..len).map(|l| if l == 0 { len } else { l - 1 }).collect();
    let next_idx: Vec<usize> = (0..len).map(|l| if l + 1 == len { len } else { l + 1 }).collect();
    let prev = g.gather_rows(padded, Rc::new(prev_idx));
    let next = g.gather_rows(padded, Rc::new(next_idx));
    let im2col = g.concat_cols(&[prev, x, next]);
    linear(g, im2col, w, b)
}

/// Residual block counts per stage.
pub const CONV_STAGE_BLOCKS: [usize; 4] = [3, 4, 6, 3];

pub struct ConvBlockParams {
    pub w1: Var,
    pub b1: Var,
    pub w2: Var,
    pub b2: Var,
    /// 1x1 shortcut projection, present on the first block of a stage whose
    /// channel width differs from its input.
    pub proj: Option<(Var, Var)>,
}

pub struct ConvStackParams {
    pub blocks: Vec<ConvBlockParams>,
}

/// Stack of residual conv blocks: `out = shortcut(x) + conv2(gelu(conv1(x)))`.
/// Sequence length is preserved throughout.
pub fn residual_conv_stack(g: &mut Graph, x: Var, p: &ConvStackParams) -> Var {
    let mut h = x;
    for block in &p.blocks {
        let short = match block.proj {
            Some((w, b)) => linear(g, h, w, b),
            None => h,
        };
        let c1 = conv1d_k3(g, h, block.w1, block.b1);
        let a = g.gelu(c1);
        let c2 = conv1d_k3(g, a, block.w2, block.b2);
        h = g.add(short, c2);
    }
    h
}

/// Sums one embedding-table lookup per discrete feature column.
pub fn embed_sum(g: &mut Graph, tables: &[Var], columns: &[Rc<Vec<usize>>]) -> Var {
    assert_eq!(tables.len(), columns.len(), "one table per feature");
    let mut acc: Option<Var> = None;
    for (&table, idx) in tables.iter().zip(columns) {
        let e = g.gather_rows(table, idx.clone());
        acc = Some(match acc {
            Some(prev) => g.add(prev, e),
            None => e,
        });
    }
    acc.expect("at least one feature table")
}
