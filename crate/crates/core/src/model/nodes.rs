//! Conditional densities of the individual DAG nodes.

use std::f64::consts::PI;

use super::data::SubredditCatalog;
use super::params::ModelParameters;
use crate::error::{Error, Result};

/// Logistic function, evaluated without overflow for any finite input.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Bernoulli log-mass of `y` under logit `eta`.
#[inline]
pub fn bernoulli_logmass(y: bool, eta: f64) -> f64 {
    if y {
        -softplus(-eta)
    } else {
        -softplus(eta)
    }
}

/// Gaussian log-density with the second argument a variance.
#[inline]
pub fn gaussian_logpdf(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * (2.0 * PI * variance).ln() - 0.5 * d * d / variance
}

#[inline]
pub(crate) fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_len(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::dim(what, expected, got));
    }
    Ok(())
}

/// Log-density of short-term engagement given long-term engagement.
pub fn engagement_logdensity(e_short: f64, e_long: f64, params: &ModelParameters) -> Result<f64> {
    if !(params.theta_e > 0.0) {
        return Err(Error::invalid("theta_E", format!("variance must be positive, got {}", params.theta_e)));
    }
    Ok(gaussian_logpdf(
        e_short,
        params.beta_e1 * e_long + params.beta_e0,
        params.theta_e,
    ))
}

pub(crate) fn participation_long_logit(d_dot: f64, popularity: f64, e_long: f64, params: &ModelParameters) -> f64 {
    params.beta_p_long1 * d_dot + params.beta_p_long2 * popularity + params.beta_p_long3 * e_long + params.beta_p_long0
}

/// Per-subreddit probability of long-term participation.
pub fn participation_long_prob(
    demographics: &[f64],
    catalog: &SubredditCatalog,
    e_long: f64,
    params: &ModelParameters,
) -> Result<Vec<f64>> {
    check_len("D", 4, demographics.len())?;
    let d: [f64; 4] = demographics.try_into().expect("length checked");
    Ok(catalog
        .scores()
        .iter()
        .zip(catalog.popularity())
        .map(|(row, &pop)| sigmoid(participation_long_logit(dot(row, &d), pop, e_long, params)))
        .collect())
}

/// Mean of the sympathy equation. It has no intercept.
pub fn sympathy_mean(demographics: &[f64; 4], e_long: f64, m_long: &[f64; 3], params: &ModelParameters) -> f64 {
    dot(&params.beta_s1, demographics) + params.beta_s2 * e_long + dot(&params.beta_s3, m_long)
}

/// Per-subreddit probability of short-term participation.
pub fn participation_short_prob(
    sympathy: f64,
    p_long: &[bool],
    catalog: &SubredditCatalog,
    e_short: f64,
    params: &ModelParameters,
) -> Result<Vec<f64>> {
    check_len("P_L", catalog.len(), p_long.len())?;
    Ok(catalog
        .scores()
        .iter()
        .zip(catalog.popularity())
        .zip(p_long)
        .map(|((row, &pop), &pl)| {
            let eta = sympathy * dot(&params.beta_p_short1, row)
                + params.beta_p_short2 * f64::from(u8::from(pl))
                + params.beta_p_short3 * pop
                + params.beta_p_short4 * e_short
                + params.beta_p_short0;
            sigmoid(eta)
        })
        .collect())
}

/// Probability of interacting with an activist.
pub fn interaction_prob(
    p_short: &[bool],
    catalog: &SubredditCatalog,
    e_short: f64,
    params: &ModelParameters,
) -> Result<f64> {
    check_len("P_S", catalog.len(), p_short.len())?;
    let mut q = [0.0; 4];
    for (row, _) in catalog.scores().iter().zip(p_short).filter(|(_, &p)| p) {
        for j in 0..4 {
            q[j] += row[j];
        }
    }
    Ok(sigmoid(dot(&params.beta_i1, &q) + params.beta_i2 * e_short + params.beta_i0))
}

pub(crate) fn activation_logit(
    sympathy: f64,
    interacted: bool,
    m_short: &[f64; 3],
    m_long: &[f64; 3],
    e_short: f64,
    params: &ModelParameters,
) -> f64 {
    params.beta_a1 * sympathy
        + params.beta_a2 * f64::from(u8::from(interacted))
        + dot(&params.beta_a3, m_short)
        + dot(&params.beta_a4, m_long)
        + params.beta_a5 * e_short
        + params.beta_a0
}

/// Probability of activation.
pub fn activation_prob(
    sympathy: f64,
    interacted: bool,
    m_short: &[f64; 3],
    m_long: &[f64; 3],
    e_short: f64,
    params: &ModelParameters,
) -> f64 {
    sigmoid(activation_logit(sympathy, interacted, m_short, m_long, e_short, params))
}
