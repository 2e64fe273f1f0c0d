#![allow(dead_code)]

use climact::model::{forward_sample, random_catalog, Dataset, Hyperparameters, MediaGenerator, ModelParameters};

pub fn simulate(params: &ModelParameters, k: usize, n: usize, var_s: f64, seed: u64) -> Dataset {
    simulate_with_media(params, k, n, var_s, &MediaGenerator::default(), seed)
}

pub fn simulate_with_media(
    params: &ModelParameters,
    k: usize,
    n: usize,
    var_s: f64,
    media: &MediaGenerator,
    seed: u64,
) -> Dataset {
    let catalog = random_catalog(k, seed ^ 0xc0ffee).unwrap();
    let (users, _) = forward_sample(params, &catalog, &Hyperparameters::with_var_s(var_s), n, media, seed).unwrap();
    Dataset::new(catalog, users).unwrap()
}

pub mod fd;
pub mod oracle;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Every coefficient uniform on `[-scale, scale]`; `theta_E` in `[0.2, 2]`.
pub fn random_params(rng: &mut ChaCha8Rng, scale: f64) -> ModelParameters {
    let mut f = [0.0; 39];
    for v in f.iter_mut() {
        *v = uniform(rng, -scale, scale);
    }
    f[2] = uniform(rng, 0.2f64.ln(), 2f64.ln());
    ModelParameters::from_flat(&f).unwrap()
}

pub fn random_users(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<climact::model::UserObservation> {
    (0..n)
        .map(|u| climact::model::UserObservation {
            id: format!("r{u}"),
            p_long: (0..k).map(|_| rng.random::<bool>()).collect(),
            p_short: (0..k).map(|_| rng.random::<bool>()).collect(),
            e_long: uniform(rng, -2.0, 2.0),
            e_short: uniform(rng, -2.0, 2.0),
            m_long: [uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)],
            m_short: [uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)],
            interacted: rng.random::<bool>(),
            activated: rng.random::<bool>(),
            location: None,
        })
        .collect()
}

pub fn random_latents(rng: &mut ChaCha8Rng, n: usize) -> climact::model::LatentState {
    climact::model::LatentState {
        demographics: (0..n)
            .map(|_| [uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)])
            .collect(),
        sympathy: (0..n).map(|_| uniform(rng, -3.0, 3.0)).collect(),
    }
}
