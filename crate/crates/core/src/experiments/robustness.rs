use serde::{Deserialize, Serialize};

use super::stats::pearson;
use crate::error::{Error, Result};
use crate::inference::{fit, FitConfig, FitResult};
use crate::model::{Dataset, Hyperparameters, Structure};

/// A parameter's posterior mean under both windowing regimes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedCoefficient {
    pub name: String,
    pub gap_on: f64,
    pub gap_off: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessOutcome {
    pub correlation: f64,
    pub pairs: Vec<PairedCoefficient>,
    pub gap_on: FitResult,
    pub gap_off: FitResult,
}

/// Pairs the parameter means of two fits by name. Latents never appear in
/// the parameter list, so they are excluded by construction.
pub fn paired_coefficients(a: &FitResult, b: &FitResult) -> Vec<PairedCoefficient> {
    a.parameters
        .iter()
        .filter_map(|p| {
            b.parameter(&p.name).map(|q| PairedCoefficient {
                name: p.name.clone(),
                gap_on: p.mean,
                gap_off: q.mean,
            })
        })
        .collect()
}

pub fn coefficient_correlation(pairs: &[PairedCoefficient]) -> Result<f64> {
    if pairs.len() < 3 {
        return Err(Error::invalid(
            "robustness",
            format!("need at least 3 shared parameters to correlate, got {}", pairs.len()),
        ));
    }
    let x: Vec<f64> = pairs.iter().map(|p| p.gap_on).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.gap_off).collect();
    pearson(&x, &y)
}

/// Fits the same users with and without the gap between the long- and
/// short-term windows and correlates the coefficient means.
pub fn run_robustness(
    gap_on: &Dataset,
    gap_off: &Dataset,
    hyper: &Hyperparameters,
    structure: &Structure,
    config: &FitConfig,
) -> Result<RobustnessOutcome> {
    if gap_on.catalog != gap_off.catalog {
        return Err(Error::invalid("robustness", "the two regimes use different catalogs"));
    }
    let same_users = gap_on.n_users() == gap_off.n_users()
        && gap_on.users.iter().zip(&gap_off.users).all(|(a, b)| a.id == b.id);
    if !same_users {
        return Err(Error::invalid("robustness", "the two regimes must list the same users in the same order"));
    }
    let (on, off) = rayon::join(
        || fit(gap_on, hyper, structure, config),
        || fit(gap_off, hyper, structure, config),
    );
    let (on, off) = (on?, off?);
    let pairs = paired_coefficients(&on, &off);
    let correlation = coefficient_correlation(&pairs)?;
    Ok(RobustnessOutcome {
        correlation,
        pairs,
        gap_on: on,
        gap_off: off,
    })
}
