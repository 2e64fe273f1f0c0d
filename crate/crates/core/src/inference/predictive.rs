use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use super::guide::GuideState;
use super::objective::Objective;
use super::seeds::derive_seed;
use crate::error::{Error, Result};
use crate::model::nodes::{dot, sigmoid};
use crate::model::{ClimateModel, ModelParameters};

fn id_key(id: &str) -> u64 {
    let digest = Sha256::digest(id.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// Per-draw fraction of users whose resampled activation equals the observed
/// one.
///
/// Each draw samples the parameters and every user's sympathy from the guide
/// and then the activation bit. Per-user randomness is keyed by user id, so
/// the result does not depend on user order.
pub fn predictive_accuracy_samples(
    model: &ClimateModel<'_>,
    guide: &GuideState,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if guide.dim() != model.dim() {
        return Err(Error::dim("guide", model.dim(), guide.dim()));
    }
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "must be at least 1"));
    }
    let users = model.users();
    if users.is_empty() {
        return Err(Error::invalid("users", "no users to predict"));
    }
    let keys: Vec<u64> = users.iter().map(|u| id_key(&u.id)).collect();
    let np = model.n_param_coords();
    let mut z = vec![0.0; np];
    (0..n_samples)
        .map(|draw| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, draw as u64, u64::MAX));
            for (i, zi) in z.iter_mut().enumerate() {
                let e: f64 = rng.sample(StandardNormal);
                *zi = guide.mean[i] + guide.scale(i) * e;
            }
            let mut full = z.clone();
            full.resize(model.dim(), 0.0);
            let p = ModelParameters::from_flat(&model.flat_params(&full))?;
            let mut correct = 0usize;
            for (u, user) in users.iter().enumerate() {
                let mut urng = ChaCha8Rng::seed_from_u64(derive_seed(seed, draw as u64, keys[u]));
                let c = model.sympathy_coord(u);
                let e: f64 = urng.sample(StandardNormal);
                let s = guide.mean[c] + guide.scale(c) * e;
                let eta = p.beta_a1 * s
                    + p.beta_a2 * f64::from(u8::from(user.interacted))
                    + dot(&p.beta_a3, &user.m_short)
                    + dot(&p.beta_a4, &user.m_long)
                    + p.beta_a5 * user.e_short
                    + p.beta_a0;
                let a = urng.random::<f64>() < sigmoid(eta);
                correct += usize::from(a == user.activated);
            }
            Ok(correct as f64 / users.len() as f64)
        })
        .collect()
}

/// Mean over `n_samples` posterior predictive draws of the fraction of users
/// whose sampled activation matches the observation.
pub fn posterior_predictive_accuracy(
    model: &ClimateModel<'_>,
    guide: &GuideState,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let samples = predictive_accuracy_samples(model, guide, n_samples, seed)?;
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}
