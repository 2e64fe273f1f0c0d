//! Ancestral sampling of synthetic users.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::data::{LatentState, SubredditCatalog, UserObservation};
use super::nodes::*;
use super::params::{Hyperparameters, ModelParameters};
use crate::error::{Error, Result};

/// How the synthetic media features are drawn.
///
/// With `n_areas == 0` every user gets an independent draw. Otherwise users
/// are assigned uniformly to `n_areas` areas and share the area's features.
/// Short-term features correlate with the long-term ones with
/// `long_short_corr`; a correlation of 1 gives media that is constant in time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MediaGenerator {
    pub sd: f64,
    pub long_short_corr: f64,
    pub n_areas: usize,
}

impl Default for MediaGenerator {
    fn default() -> Self {
        Self {
            sd: 1.0,
            long_short_corr: 0.5,
            n_areas: 0,
        }
    }
}

impl MediaGenerator {
    pub fn validate(&self) -> Result<()> {
        if !(self.sd > 0.0 && self.sd.is_finite()) {
            return Err(Error::invalid("media generator", format!("sd must be positive, got {}", self.sd)));
        }
        if !(-1.0..=1.0).contains(&self.long_short_corr) {
            return Err(Error::invalid(
                "media generator",
                format!("long_short_corr must lie in [-1, 1], got {}", self.long_short_corr),
            ));
        }
        Ok(())
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> ([f64; 3], [f64; 3]) {
        let rho = self.long_short_corr;
        let keep = (1.0 - rho * rho).max(0.0).sqrt();
        let mut long = [0.0; 3];
        let mut short = [0.0; 3];
        for j in 0..3 {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            long[j] = self.sd * a;
            short[j] = self.sd * (rho * a + keep * b);
        }
        (long, short)
    }
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Samples `n_users` users in topological order of the network and returns
/// their observations together with the true latents. Deterministic in
/// `seed`.
pub fn forward_sample(
    params: &ModelParameters,
    catalog: &SubredditCatalog,
    hyper: &Hyperparameters,
    n_users: usize,
    media: &MediaGenerator,
    seed: u64,
) -> Result<(Vec<UserObservation>, LatentState)> {
    if n_users == 0 {
        return Err(Error::invalid("n_users", "must be at least 1"));
    }
    params.validate()?;
    hyper.validate()?;
    media.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let areas: Vec<([f64; 3], [f64; 3])> = (0..media.n_areas).map(|_| media.draw(&mut rng)).collect();
    let width = n_users.to_string().len();
    let theta_sd = params.theta_e.sqrt();
    let var_s_sd = hyper.var_s.sqrt();

    let mut users = Vec::with_capacity(n_users);
    let mut latents = LatentState {
        demographics: Vec::with_capacity(n_users),
        sympathy: Vec::with_capacity(n_users),
    };
    for u in 0..n_users {
        let d = [normal(&mut rng), normal(&mut rng), normal(&mut rng), normal(&mut rng)];
        let e_long = normal(&mut rng);
        let (m_long, m_short, location) = if areas.is_empty() {
            let (l, s) = media.draw(&mut rng);
            (l, s, None)
        } else {
            let a = rng.random_range(0..areas.len());
            (areas[a].0, areas[a].1, Some(format!("area_{a}")))
        };
        let e_short = params.beta_e1 * e_long + params.beta_e0 + theta_sd * normal(&mut rng);
        let p_long: Vec<bool> = participation_long_prob(&d, catalog, e_long, params)?
            .into_iter()
            .map(|p| rng.random::<f64>() < p)
            .collect();
        let s = sympathy_mean(&d, e_long, &m_long, params) + var_s_sd * normal(&mut rng);
        let p_short: Vec<bool> = participation_short_prob(s, &p_long, catalog, e_short, params)?
            .into_iter()
            .map(|p| rng.random::<f64>() < p)
            .collect();
        let interacted = rng.random::<f64>() < interaction_prob(&p_short, catalog, e_short, params)?;
        let activated = rng.random::<f64>() < activation_prob(s, interacted, &m_short, &m_long, e_short, params);

        users.push(UserObservation {
            id: format!("u{u:0width$}"),
            p_long,
            p_short,
            e_long,
            e_short,
            m_long,
            m_short,
            interacted,
            activated,
            location,
        });
        latents.demographics.push(d);
        latents.sympathy.push(s);
    }
    Ok((users, latents))
}

/// Extends each user's long-term participation over `extra_weeks` more weeks
/// of a `base_weeks`-long window, assuming weekly participation draws that are
/// independent and stationary at the rate implied by the node probabilities.
/// The added weeks carry no signal beyond the user's latents.
pub fn extend_long_participation(
    users: &[UserObservation],
    latents: &LatentState,
    params: &ModelParameters,
    catalog: &SubredditCatalog,
    base_weeks: u32,
    extra_weeks: u32,
    seed: u64,
) -> Result<Vec<UserObservation>> {
    if base_weeks == 0 {
        return Err(Error::invalid("base_weeks", "must be positive"));
    }
    latents.validate(users.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratio = f64::from(extra_weeks) / f64::from(base_weeks);
    users
        .iter()
        .zip(&latents.demographics)
        .map(|(user, d)| {
            let probs = participation_long_prob(d, catalog, user.e_long, params)?;
            let mut out = user.clone();
            for (bit, p) in out.p_long.iter_mut().zip(probs) {
                // P(no post in the extra weeks) = (1 - p)^(extra / base)
                let extra = 1.0 - (1.0 - p).powf(ratio);
                let draw = rng.random::<f64>() < extra;
                *bit = *bit || draw;
            }
            Ok(out)
        })
        .collect()
}

/// A random catalog: score rows and popularity drawn standard normal.
pub fn random_catalog(k: usize, seed: u64) -> Result<SubredditCatalog> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = (0..k).map(|i| format!("sub{i:04}")).collect();
    let scores = (0..k)
        .map(|_| [normal(&mut rng), normal(&mut rng), normal(&mut rng), normal(&mut rng)])
        .collect();
    let popularity = (0..k).map(|_| normal(&mut rng)).collect();
    SubredditCatalog::new(names, scores, popularity)
}
