//! Dense 64-bit tensor math with reverse-mode differentiation, the layers
//! the wireframe models need, an adaptive-moment optimizer, and the warmup
//! plus cosine learning-rate schedule.
//!
//! Everything is two-dimensional: matrices, row vectors (1 x C), and
//! scalars (1 x 1). Training is single-threaded and allocation order is
//! fixed, so runs with the same seed are bit-identical.

mod checkpoint;
pub mod fd;
mod graph;
mod layers;
mod optim;
mod params;
mod schedule;
mod targets;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use graph::{Graph, Var};
pub use layers::{
    attention_block, conv1d_k3, embed_sum, feed_forward_block, graph_conv, linear,
    residual_conv_stack, AttentionParams, ConvBlockParams, ConvStackParams, FeedForwardParams,
    CONV_STAGE_BLOCKS,
};
pub use optim::Adam;
pub use params::{Binding, ParamStore, TensorError};
pub use schedule::{lr_at, TrainConfig};
pub use targets::smoothed_coordinate_targets;
