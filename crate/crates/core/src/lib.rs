//! Frequency-domain prompting toolkit.
//!
//! The crate implements the desk-scale mathematics of a frequency-prompted
//! segmentation pipeline: level-1 Haar wavelet analysis of an input image,
//! window scoring and extremum point selection on the resulting
//! high-frequency map, prior-gated adapter injection for transformer token
//! stacks, a spatial + channel state-space decoder block with a hand-derived
//! backward pass, weighted segmentation losses, and a five-metric evaluation
//! suite with prompt-error analysis.
//!
//! All operations are pure functions over immutable value types and are
//! deterministic: identical inputs (including seeds) produce bit-identical
//! outputs.

pub mod analysis;
pub mod error;
pub mod fga;
pub mod fps;
pub mod fvm;
pub mod io;
pub mod loss;
pub mod metrics;
pub mod noise;
pub mod rng;
pub mod tensor;
pub mod wavelet;

pub use error::{Error, Result};
pub use tensor::{BinaryMask, FeatureGrid, Image, PoolMode, ProbMask};
