//! Stochastic variational inference: mean-field Gaussian guide,
//! reparameterized ELBO, Adam, restarts and posterior predictive scoring.

mod adam;
mod elbo;
mod fit;
mod guide;
mod objective;
mod predictive;
mod seeds;

pub use adam::AdamState;
pub use elbo::{
    draw_noise, elbo_and_gradient_with_noise, elbo_estimate, elbo_gradient, elbo_with_noise, GradientEstimator,
};
pub use fit::{
    fit, orient_guide, FitConfig, FitResult, LatentSummary, ParameterSummary, RestartRecord, Z_95,
};

pub use guide::{GuideState, INIT_VARIANCE};
pub use objective::Objective;
pub use predictive::{posterior_predictive_accuracy, predictive_accuracy_samples};
pub use seeds::derive_seed;
