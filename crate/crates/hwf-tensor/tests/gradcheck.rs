//! Finite-difference checks for every differentiable op and layer: the
//! analytic backward pass must match central differences (h = 1e-5) within
//! a relative 1e-4 on random small tensors.

use std::rc::Rc;

use hwf_tensor::fd;
use hwf_tensor::{
    attention_block, conv1d_k3, embed_sum, feed_forward_block, graph_conv, linear,
    residual_conv_stack, AttentionParams, ConvBlockParams, ConvStackParams, FeedForwardParams,
    Graph, ParamStore, Var,
};
use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-5;
const TOL: f64 = 1e-4;

use hwf_tensor::Binding;

fn random_store(shapes: &[(&str, (usize, usize))], seed: u64) -> ParamStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = ParamStore::new();
    for (name, (r, c)) in shapes {
        let v = Array2::from_shape_fn((*r, *c), |_| rng.gen_range(-0.9..0.9));
        store.register(name, v).unwrap();
    }
    store
}

/// Runs the oracle: analytic gradients from one tape vs central
/// differences of the rebuilt forward, on every parameter entry.
fn check_scalar_fn<F>(shapes: &[(&str, (usize, usize))], seed: u64, forward: F)
where
    F: Fn(&mut Graph, &Binding) -> Var,
{
    let mut store = random_store(shapes, seed);
    let mut g = Graph::new();
    let binding = store.bind(&mut g);
    let loss = forward(&mut g, &binding);
    let grads = g.backward(loss);
    let analytic = fd::grads_by_name(&store, &binding, &grads);
    let eval = |s: &ParamStore| -> f64 {
        let mut g = Graph::new();
        let b = s.bind(&mut g);
        let l = forward(&mut g, &b);
        g.scalar_value(l)
    };
    fd::check(&mut store, &analytic, eval, H, TOL, usize::MAX).unwrap();
}

#[test]
fn matmul_transpose_sum() {
    check_scalar_fn(&[("a", (3, 4)), ("b", (4, 2))], 1, |g, p| {
        let prod = g.matmul(p.var("a"), p.var("b"));
        let t = g.transpose(prod);
        g.sum(t)
    });
}

#[test]
fn add_mul_mean() {
    check_scalar_fn(&[("a", (3, 3)), ("b", (3, 3))], 2, |g, p| {
        let s = g.add(p.var("a"), p.var("b"));
        let m = g.mul(s, p.var("a"));
        g.mean(m)
    });
}

#[test]
fn add_row_and_scale_by() {
    check_scalar_fn(&[("a", (4, 3)), ("bias", (1, 3)), ("s", (1, 1))], 3, |g, p| {
        let y = g.add_row(p.var("a"), p.var("bias"));
        let y = g.scale_by(y, p.var("s"));
        g.sum(y)
    });
}

#[test]
fn scale_shift_sub() {
    check_scalar_fn(&[("a", (2, 5)), ("b", (2, 5))], 4, |g, p| {
        let y = g.scale(p.var("a"), 1.7);
        let y = g.shift(y, -0.3);
        let d = g.sub(y, p.var("b"));
        let sq = g.mul(d, d);
        g.mean(sq)
    });
}

#[test]
fn mean_rows_path() {
    check_scalar_fn(&[("a", (5, 3))], 5, |g, p| {
        let m = g.mean_rows(p.var("a"));
        let sq = g.mul(m, m);
        g.sum(sq)
    });
}

#[test]
fn activations() {
    check_scalar_fn(&[("a", (3, 4))], 6, |g, p| {
        let r = g.relu(p.var("a"));
        let ge = g.gelu(r);
        let si = g.sigmoid(ge);
        g.sum(si)
    });
}

#[test]
fn ln_of_positive_values() {
    check_scalar_fn(&[("a", (3, 3))], 7, |g, p| {
        let pos = g.sigmoid(p.var("a")); // strictly inside (0, 1)
        let l = g.ln(pos);
        g.sum(l)
    });
}

#[test]
fn softmax_weighted_sum() {
    check_scalar_fn(&[("a", (3, 5)), ("w", (3, 5))], 8, |g, p| {
        let sm = g.softmax(p.var("a"));
        let weighted = g.mul(sm, p.var("w"));
        g.sum(weighted)
    });
}

#[test]
fn cross_entropy_composite() {
    // -sum(target * log_softmax(logits)) with fixed targets.
    check_scalar_fn(&[("logits", (4, 7))], 9, |g, p| {
        let mut t = Array2::zeros((4, 7));
        for r in 0..4 {
            t[(r, (3 * r + 1) % 7)] = 0.8;
            t[(r, (3 * r + 2) % 7)] = 0.2;
        }
        let targets = g.constant(t);
        let ls = g.log_softmax(p.var("logits"));
        let prod = g.mul(targets, ls);
        let s = g.sum(prod);
        g.scale(s, -1.0)
    });
}

#[test]
fn layer_norm_all_inputs() {
    check_scalar_fn(&[("x", (4, 6)), ("gamma", (1, 6)), ("beta", (1, 6)), ("w", (4, 6))], 10, |g, p| {
        let y = g.layer_norm(p.var("x"), p.var("gamma"), p.var("beta"));
        let weighted = g.mul(y, p.var("w"));
        g.sum(weighted)
    });
}

#[test]
fn gather_and_scatter_mean() {
    check_scalar_fn(&[("table", (5, 3))], 11, |g, p| {
        let picked = g.gather_rows(p.var("table"), Rc::new(vec![0, 2, 2, 4, 1]));
        let groups = Rc::new(vec![vec![0, 1, 2], vec![], vec![3, 4]]);
        let pooled = g.scatter_mean(picked, groups);
        let sq = g.mul(pooled, pooled);
        g.sum(sq)
    });
}

#[test]
fn concat_and_slice() {
    check_scalar_fn(&[("a", (2, 3)), ("b", (3, 3)), ("c", (2, 2))], 12, |g, p| {
        let rows = g.concat_rows(&[p.var("a"), p.var("b")]); // (5, 3)
        let left = g.slice_rows(rows, 1, 2); // (2, 3)
        let cols = g.concat_cols(&[left, p.var("c")]); // (2, 5)
        let mid = g.slice_cols(cols, 2, 3); // (2, 3)
        let sq = g.mul(mid, mid);
        g.sum(sq)
    });
}

#[test]
fn detach_stops_gradient_flow() {
    let mut store = random_store(&[("a", (2, 2))], 13);
    let mut g = Graph::new();
    let b = store.bind(&mut g);
    let d = g.detach(b.var("a"));
    let prod = g.mul(b.var("a"), d);
    let loss = g.sum(prod);
    let grads = g.backward(loss);
    // d(sum(a * const))/da = const = value of a.
    let expected = store.get("a").unwrap().clone();
    assert_eq!(grads.get(b.var("a")).unwrap(), &expected);
}

#[test]
fn straight_through_matches_surrogate_path() {
    // The quantized path's gradient must equal the gradient of the same
    // computation with the sign op removed (identity Jacobian contract).
    let mut store = random_store(&[("x", (4, 6)), ("w", (4, 6))], 14);
    let grad_of = |quantized: bool, store: &ParamStore| -> Array2<f64> {
        let mut g = Graph::new();
        let b = store.bind(&mut g);
        let inner = if quantized { g.sign_st(b.var("x")) } else { b.var("x") };
        let prod = g.mul(b.var("w"), inner);
        let loss = g.sum(prod);
        let grads = g.backward(loss);
        grads.get(b.var("x")).unwrap().clone()
    };
    let gq = grad_of(true, &store);
    let gs = grad_of(false, &store);
    assert_eq!(gq, gs);
    // And the surrogate path itself passes the numeric check.
    let mut g = Graph::new();
    let b = store.bind(&mut g);
    let prod = g.mul(b.var("w"), b.var("x"));
    let loss = g.sum(prod);
    let grads = g.backward(loss);
    let analytic = fd::grads_by_name(&store, &b, &grads);
    let eval = |s: &ParamStore| -> f64 {
        let mut g = Graph::new();
        let b = s.bind(&mut g);
        let prod = g.mul(b.var("w"), b.var("x"));
        let loss = g.sum(prod);
        g.scalar_value(loss)
    };
    fd::check(&mut store, &analytic, eval, H, TOL, usize::MAX).unwrap();
}

#[test]
fn linear_layer() {
    check_scalar_fn(&[("x", (5, 4)), ("w", (4, 3)), ("b", (1, 3))], 15, |g, p| {
        let y = linear(g, p.var("x"), p.var("w"), p.var("b"));
        let sq = g.mul(y, y);
        g.mean(sq)
    });
}

#[test]
fn graph_conv_layer() {
    check_scalar_fn(
        &[("x", (4, 3)), ("ws", (3, 3)), ("wn", (3, 3)), ("b", (1, 3))],
        16,
        |g, p| {
            let adj = Rc::new(vec![vec![1, 3], vec![0, 2], vec![1], vec![0]]);
            let y = graph_conv(g, p.var("x"), adj, p.var("ws"), p.var("wn"), p.var("b"));
            let sq = g.mul(y, y);
            g.sum(sq)
        },
    );
}

fn attention_shapes(d: usize) -> Vec<(&'static str, (usize, usize))> {
    vec![
        ("x", (7, d)),
        ("wq", (d, d)),
        ("wk", (d, d)),
        ("wv", (d, d)),
        ("wo", (d, d)),
        ("gamma", (1, d)),
        ("beta", (1, d)),
    ]
}

fn attention_loss(g: &mut Graph, p: &Binding, heads: usize, window: usize, causal: bool) -> Var {
    let params = AttentionParams {
        wq: p.var("wq"),
        wk: p.var("wk"),
        wv: p.var("wv"),
        wo: p.var("wo"),
        ln_gamma: p.var("gamma"),
        ln_beta: p.var("beta"),
    };
    let y = attention_block(g, p.var("x"), &params, heads, window, causal);
    let sq = g.mul(y, y);
    g.sum(sq)
}

#[test]
fn windowed_attention_layer() {
    check_scalar_fn(&attention_shapes(4), 17, |g, p| attention_loss(g, p, 2, 3, false));
}

#[test]
fn causal_attention_layer() {
    check_scalar_fn(&attention_shapes(4), 18, |g, p| attention_loss(g, p, 2, 16, true));
}

#[test]
fn feed_forward_layer() {
    check_scalar_fn(
        &[
            ("x", (5, 4)),
            ("w1", (4, 8)),
            ("b1", (1, 8)),
            ("w2", (8, 4)),
            ("b2", (1, 4)),
            ("gamma", (1, 4)),
            ("beta", (1, 4)),
        ],
        19,
        |g, p| {
            let params = FeedForwardParams {
                w1: p.var("w1"),
                b1: p.var("b1"),
                w2: p.var("w2"),
                b2: p.var("b2"),
                ln_gamma: p.var("gamma"),
                ln_beta: p.var("beta"),
            };
            let y = feed_forward_block(g, p.var("x"), &params);
            let sq = g.mul(y, y);
            g.sum(sq)
        },
    );
}

#[test]
fn conv_layer_and_stack() {
    check_scalar_fn(
        &[("x", (6, 3)), ("w", (9, 2)), ("b", (1, 2))],
        20,
        |g, p| {
            let y = conv1d_k3(g, p.var("x"), p.var("w"), p.var("b"));
            let sq = g.mul(y, y);
            g.sum(sq)
        },
    );
    check_scalar_fn(
        &[
            ("x", (5, 2)),
            ("b0.w1", (6, 3)),
            ("b0.b1", (1, 3)),
            ("b0.w2", (9, 3)),
            ("b0.b2", (1, 3)),
            ("b0.pw", (2, 3)),
            ("b0.pb", (1, 3)),
            ("b1.w1", (9, 3)),
            ("b1.b1", (1, 3)),
            ("b1.w2", (9, 3)),
            ("b1.b2", (1, 3)),
        ],
        21,
        |g, p| {
            let stack = ConvStackParams {
                blocks: vec![
                    ConvBlockParams {
                        w1: p.var("b0.w1"),
                        b1: p.var("b0.b1"),
                        w2: p.var("b0.w2"),
                        b2: p.var("b0.b2"),
                        proj: Some((p.var("b0.pw"), p.var("b0.pb"))),
                    },
                    ConvBlockParams {
                        w1: p.var("b1.w1"),
                        b1: p.var("b1.b1"),
                        w2: p.var("b1.w2"),
                        b2: p.var("b1.b2"),
                        proj: None,
                    },
                ],
            };
            let y = residual_conv_stack(g, p.var("x"), &stack);
            let sq = g.mul(y, y);
            g.sum(sq)
        },
    );
}

#[test]
fn embedding_sum_layer() {
    check_scalar_fn(&[("t0", (8, 4)), ("t1", (8, 4))], 22, |g, p| {
        let cols = vec![Rc::new(vec![0, 3, 7]), Rc::new(vec![5, 5, 1])];
        let e = embed_sum(g, &[p.var("t0"), p.var("t1")], &cols);
        let sq = g.mul(e, e);
        g.sum(sq)
    });
}
