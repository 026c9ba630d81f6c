//! Procedural 3D house-wireframe synthesis: rectilinear layout generation,
//! straight-skeleton roofs, wall lifting, augmentation, and dataset writing.

mod augment;
mod dataset;
mod error;
mod house;
mod layout;
mod rng;
mod skeleton;

pub use augment::{augment, symmetry_variant};
pub use dataset::{build_dataset, read_manifest, DatasetManifest, ManifestItem, Split};
pub use error::SynthError;
pub use house::{assemble_house, synthesize_house, SynthesisConfig};
pub use layout::{generate_layout, Layout2D, Rect};
pub use rng::{mix_seed, rng_for};
pub use skeleton::{polygon_signed_area, straight_skeleton, SkeletonGraph, SkeletonNode};
