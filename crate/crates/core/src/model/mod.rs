//! The activation network: domain types, node densities, the log joint
//! density and forward sampling.

mod data;
mod density;
pub mod nodes;
mod params;
mod sample;
mod structure;

pub use data::{Dataset, LatentState, SubredditCatalog, UserObservation};
pub use density::{joint_log_density, ClimateModel};
pub use nodes::{
    activation_prob, engagement_logdensity, interaction_prob, participation_long_prob, participation_short_prob,
    sigmoid, sympathy_mean,
};
pub use params::{
    parameter_equation, parameter_names, Equation, Hyperparameters, ModelParameters, AXES, DEFAULT_VAR_S_SWEEP,
    N_PARAMS, THEMES,
};
pub(crate) use params::{A1, P1, PS1, S1, S2, S3};
pub use sample::{extend_long_participation, forward_sample, random_catalog, MediaGenerator};
pub use structure::{parse_groups, Structure, VariableGroup};
