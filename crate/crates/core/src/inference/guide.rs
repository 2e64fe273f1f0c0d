use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Initial variance of the guide: spread of the initial means and square of
/// the initial scale.
pub const INIT_VARIANCE: f64 = 0.1;

/// Mean-field Gaussian guide, one `(mean, log_scale)` pair per coordinate.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GuideState {
    pub mean: Vec<f64>,
    pub log_scale: Vec<f64>,
}

impl GuideState {
    pub fn new(mean: Vec<f64>, log_scale: Vec<f64>) -> Result<Self> {
        if mean.len() != log_scale.len() {
            return Err(Error::dim("guide log-scales", mean.len(), log_scale.len()));
        }
        Ok(Self { mean, log_scale })
    }

    /// Means drawn from `Normal(0, INIT_VARIANCE)`, scales `sqrt(INIT_VARIANCE)`.
    pub fn init<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let sd = INIT_VARIANCE.sqrt();
        let mean = (0..dim).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
        Self {
            mean,
            log_scale: vec![sd.ln(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn scale(&self, i: usize) -> f64 {
        self.log_scale[i].exp()
    }

    /// `z = mean + exp(log_scale) * eps`.
    pub fn transform(&self, eps: &[f64], z: &mut [f64]) {
        for (((zi, &m), &ls), &e) in z.iter_mut().zip(&self.mean).zip(&self.log_scale).zip(eps) {
            *zi = m + ls.exp() * e;
        }
    }

    /// Packs means then log-scales into one vector.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.mean.clone();
        v.extend_from_slice(&self.log_scale);
        v
    }

    pub fn from_vec(v: &[f64]) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::invalid("guide vector", "odd length"));
        }
        let (m, s) = v.split_at(v.len() / 2);
        Self::new(m.to_vec(), s.to_vec())
    }

    /// Closed-form `KL(self || N(prior_mean, prior_var))` for independent
    /// coordinates.
    pub fn kl_to_normal(&self, prior_mean: &[f64], prior_var: &[f64]) -> f64 {
        self.mean
            .iter()
            .zip(&self.log_scale)
            .zip(prior_mean.iter().zip(prior_var))
            .map(|((&m, &ls), (&pm, &pv))| {
                let var = (2.0 * ls).exp();
                0.5 * ((var + (m - pm).powi(2)) / pv - 1.0 + pv.ln()) - ls
            })
            .sum()
    }
}
