//! Causal Bayesian network of climate-activism activation on social
//! platforms, with forward simulation, stochastic variational inference and
//! the ablation and robustness experiment protocols.

pub mod error;
pub mod experiments;
pub mod inference;
pub mod ingestion;
pub mod model;

pub use error::{Error, Result};
