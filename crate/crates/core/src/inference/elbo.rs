//! Monte-Carlo ELBO and its reparameterization gradient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::guide::GuideState;
use super::objective::Objective;
use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// Gradient estimator of the guide parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientEstimator {
    /// Exact derivative of the Monte-Carlo ELBO at fixed noise.
    #[default]
    Reparameterized,
    /// Path derivative only; the score term of `log q` is dropped, so the
    /// estimate vanishes sample-by-sample when the guide equals the posterior.
    PathDerivative,
}

/// Standard-normal noise for `n_samples` draws of a `dim`-dimensional guide.
pub fn draw_noise(dim: usize, n_samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fill_noise(&mut rng, dim * n_samples)
}

pub(crate) fn fill_noise<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// `log q(z)` where `z = mean + scale * eps`.
fn log_q(guide: &GuideState, eps: &[f64]) -> f64 {
    eps.iter()
        .zip(&guide.log_scale)
        .map(|(&e, &ls)| -0.5 * e * e - ls - HALF_LN_2PI)
        .sum()
}

fn check_dim(obj: &dyn Objective, guide: &GuideState) -> Result<()> {
    if obj.dim() != guide.dim() {
        return Err(Error::dim("guide", obj.dim(), guide.dim()));
    }
    Ok(())
}

/// ELBO estimate at explicit noise (`eps.len()` a multiple of the dimension).
pub fn elbo_with_noise(obj: &dyn Objective, guide: &GuideState, eps: &[f64]) -> f64 {
    let dim = guide.dim();
    let n = (eps.len() / dim.max(1)).max(1);
    let mut z = vec![0.0; dim];
    let mut total = 0.0;
    for e in eps.chunks(dim.max(1)).take(n) {
        guide.transform(e, &mut z);
        total += obj.log_density(&z) - log_q(guide, e);
    }
    total / n as f64
}

/// ELBO estimate and gradient at explicit noise. The gradient is laid out as
/// the mean block followed by the log-scale block.
pub fn elbo_and_gradient_with_noise(
    obj: &dyn Objective,
    guide: &GuideState,
    eps: &[f64],
    estimator: GradientEstimator,
    grad: &mut [f64],
) -> f64 {
    let dim = guide.dim();
    let n = (eps.len() / dim.max(1)).max(1);
    let mut z = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    grad.fill(0.0);
    let mut total = 0.0;
    let inv_n = 1.0 / n as f64;
    for e in eps.chunks(dim.max(1)).take(n) {
        guide.transform(e, &mut z);
        total += obj.log_density_and_grad(&z, &mut g) - log_q(guide, e);
        let (gm, gs) = grad.split_at_mut(dim);
        for i in 0..dim {
            let scale = guide.log_scale[i].exp();
            let (dm, ds) = match estimator {
                GradientEstimator::Reparameterized => (g[i], g[i] * scale * e[i] + 1.0),
                GradientEstimator::PathDerivative => (g[i] + e[i] / scale, g[i] * scale * e[i] + e[i] * e[i]),
            };
            gm[i] += dm * inv_n;
            gs[i] += ds * inv_n;
        }
    }
    total * inv_n
}

/// Monte-Carlo ELBO with `n_samples` reparameterized draws from `seed`.
pub fn elbo_estimate(obj: &dyn Objective, guide: &GuideState, n_samples: usize, seed: u64) -> Result<f64> {
    check_dim(obj, guide)?;
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "must be at least 1"));
    }
    let eps = draw_noise(guide.dim(), n_samples, seed);
    let v = elbo_with_noise(obj, guide, &eps);
    if !v.is_finite() {
        return Err(Error::invalid("ELBO", format!("non-finite estimate {v}; the guide diverged")));
    }
    Ok(v)
}

/// Gradient of the ELBO over all guide parameters, drawn with the same noise
/// as [`elbo_estimate`] at the same seed.
pub fn elbo_gradient(
    obj: &dyn Objective,
    guide: &GuideState,
    n_samples: usize,
    seed: u64,
    estimator: GradientEstimator,
) -> Result<Vec<f64>> {
    check_dim(obj, guide)?;
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "must be at least 1"));
    }
    let eps = draw_noise(guide.dim(), n_samples, seed);
    let mut grad = vec![0.0; 2 * guide.dim()];
    elbo_and_gradient_with_noise(obj, guide, &eps, estimator, &mut grad);
    if let Some(index) = grad.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient { index });
    }
    Ok(grad)
}
