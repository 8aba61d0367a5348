//! Core library for building and evaluating direct-mail prospecting models:
//! a small dense-network engine, a tabular data pipeline with ratio-based
//! negative sampling, an autoencoder feature extractor, a weighted-loss
//! feed-forward classifier, a random-forest baseline, and campaign-style
//! ranking/conversion evaluation.

pub mod autoencoder;
pub mod classifier;
pub mod container;
pub mod data;
pub mod error;
pub mod eval;
pub mod forest;
pub mod nn;
pub mod pipeline;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
pub use nn::loss::ClassWeights;
pub use tensor::Tensor2D;
