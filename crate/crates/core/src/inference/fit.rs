//! Stochastic variational inference with random restarts.

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::elbo::{elbo_and_gradient_with_noise, fill_noise, GradientEstimator};
use super::guide::GuideState;
use super::objective::Objective;
use super::predictive::predictive_accuracy_samples;
use super::seeds::derive_seed;
use crate::error::{Error, Result};
use crate::model::{
    parameter_equation, parameter_names, ClimateModel, Dataset, Hyperparameters, Structure, A1, P1, PS1, S1, S2,
    S3,
};

/// z-value of a central 95% normal interval.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub learning_rate: f64,
    pub n_restarts: usize,
    /// Upper bound on optimization steps per restart.
    pub n_steps: usize,
    pub mc_samples_per_step: usize,
    pub n_predictive_samples: usize,
    pub seed: u64,
    /// Sympathy variance; overrides the value in the hyperparameters passed
    /// to [`fit`].
    pub var_s: f64,
    /// Stop once the windowed mean ELBO improves by less than this fraction
    /// of its magnitude. `None` always runs `n_steps`.
    pub early_stop_rel_tol: Option<f64>,
    /// Steps per smoothing window of the early-stop rule.
    pub smoothing_window: usize,
    /// Fraction of users per gradient step; `None` uses every user.
    pub minibatch_fraction: Option<f64>,
    pub estimator: GradientEstimator,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            n_restarts: 10,
            n_steps: 5000,
            mc_samples_per_step: 1,
            n_predictive_samples: 100,
            seed: 0,
            var_s: 1.0,
            early_stop_rel_tol: Some(1e-3),
            smoothing_window: 100,
            minibatch_fraction: None,
            estimator: GradientEstimator::Reparameterized,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_restarts", self.n_restarts),
            ("n_steps", self.n_steps),
            ("mc_samples_per_step", self.mc_samples_per_step),
            ("n_predictive_samples", self.n_predictive_samples),
            ("smoothing_window", self.smoothing_window),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::invalid(name, "must be at least 1"));
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate", format!("must be positive, got {}", self.learning_rate)));
        }
        if let Some(f) = self.minibatch_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::invalid("minibatch_fraction", format!("must lie in (0, 1], got {f}")));
            }
        }
        Ok(())
    }
}

/// Posterior summary of one model parameter under the guide.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary {
    pub name: String,
    pub equation: String,
    pub mean: f64,
    pub sd: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ParameterSummary {
    pub fn covers(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Outcome of one restart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub index: usize,
    /// Mean ELBO over the last smoothing window.
    #[serde(deserialize_with = "nan_from_null")]
    pub elbo: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub accuracy: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub accuracy_sd: f64,
    pub steps: usize,
    pub diverged: bool,
    pub message: Option<String>,
}

// serde_json writes non-finite floats as null
fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// Posterior summary of one user's latents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatentSummary {
    pub user_id: String,
    pub activated: bool,
    pub sympathy_mean: f64,
    pub sympathy_sd: f64,
    pub demographics_mean: Option<[f64; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub structure: Structure,
    pub var_s: f64,
    pub n_users: usize,
    pub seed: u64,
    pub parameters: Vec<ParameterSummary>,
    pub restarts: Vec<RestartRecord>,
    pub best_restart: usize,
    /// Posterior predictive accuracy draws of the selected restart.
    pub accuracy_samples: Vec<f64>,
    /// Per-step ELBO of the selected restart.
    pub elbo_trace: Vec<f64>,
    #[serde(skip)]
    pub best_guide: GuideState,
    pub latents: Vec<LatentSummary>,
}

impl FitResult {
    pub fn parameter(&self, name: &str) -> Option<&ParameterSummary> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn best(&self) -> &RestartRecord {
        &self.restarts[self.best_restart]
    }

    pub fn accuracy(&self) -> f64 {
        self.best().accuracy
    }

    /// Difference between the mean posterior sympathy of activated and
    /// non-activated users.
    pub fn sympathy_separation(&self) -> f64 {
        let mean = |flag: bool| {
            let v: Vec<f64> =
                self.latents.iter().filter(|l| l.activated == flag).map(|l| l.sympathy_mean).collect();
            v.iter().sum::<f64>() / v.len().max(1) as f64
        };
        mean(true) - mean(false)
    }

    /// Parameter means excluding latents, in layout order.
    pub fn parameter_means(&self) -> Vec<f64> {
        self.parameters.iter().map(|p| p.mean).collect()
    }

    /// Per-user means of the sociodemographic latents, standardized per axis
    /// over the population. `None` when the group was removed.
    pub fn standardized_demographics(&self) -> Option<Vec<[f64; 4]>> {
        let d: Vec<[f64; 4]> = self.latents.iter().map(|l| l.demographics_mean).collect::<Option<_>>()?;
        let n = d.len() as f64;
        if n < 2.0 {
            return Some(d);
        }
        let mut out = d.clone();
        for j in 0..4 {
            let mean = d.iter().map(|r| r[j]).sum::<f64>() / n;
            let sd = (d.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            for (o, r) in out.iter_mut().zip(&d) {
                o[j] = if sd > 0.0 { (r[j] - mean) / sd } else { 0.0 };
            }
        }
        Some(out)
    }
}

struct RestartOutcome {
    record: RestartRecord,
    guide: GuideState,
    trace: Vec<f64>,
    accuracy_samples: Vec<f64>,
}

fn coord_of(model: &ClimateModel<'_>, slot: usize) -> Option<usize> {
    model.param_slots().iter().position(|&s| s == slot)
}

/// Fixes the two sign symmetries of the network. Negating the latent
/// sociodemographics together with the long-participation and sympathy
/// loadings leaves the joint density unchanged, as does negating sympathy
/// together with every coefficient that touches it. The guide is reflected so
/// that the participation and activation loadings have non-negative means.
pub fn orient_guide(model: &ClimateModel<'_>, guide: &mut GuideState) {
    let n_users = model.users().len();
    if let Some(c) = coord_of(model, P1) {
        if guide.mean[c] < 0.0 {
            for slot in std::iter::once(P1).chain(S1..S1 + 4) {
                if let Some(c) = coord_of(model, slot) {
                    guide.mean[c] = -guide.mean[c];
                }
            }
            for u in 0..n_users {
                if let Some(c0) = model.demographics_coord(u) {
                    for c in c0..c0 + 4 {
                        guide.mean[c] = -guide.mean[c];
                    }
                }
            }
        }
    }
    if let Some(c) = coord_of(model, A1) {
        if guide.mean[c] < 0.0 {
            let slots = std::iter::once(A1).chain(S1..S1 + 4).chain([S2]).chain(S3..S3 + 3).chain(PS1..PS1 + 4);
            for slot in slots {
                if let Some(c) = coord_of(model, slot) {
                    guide.mean[c] = -guide.mean[c];
                }
            }
            for u in 0..n_users {
                let c = model.sympathy_coord(u);
                guide.mean[c] = -guide.mean[c];
            }
        }
    }
}

/// Minibatch ELBO and gradient at fixed noise.
fn batch_elbo_and_gradient(
    model: &ClimateModel<'_>,
    guide: &GuideState,
    eps: &[f64],
    batch: &[usize],
    scale: f64,
    estimator: GradientEstimator,
    grad: &mut [f64],
) -> f64 {
    let dim = guide.dim();
    let np = model.n_param_coords();
    let stride = model.latent_stride();
    let n_samples = eps.len() / dim;
    let mut weight = vec![0.0; dim];
    weight[..np].fill(1.0);
    for &u in batch {
        weight[np + u * stride..np + (u + 1) * stride].fill(scale);
    }
    let mut z = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    grad.fill(0.0);
    let inv_n = 1.0 / n_samples as f64;
    let mut total = 0.0;
    for e in eps.chunks(dim) {
        guide.transform(e, &mut z);
        let lp = model.log_density_and_grad_batch(&z, &mut g, batch, scale);
        let log_q: f64 = (0..dim)
            .filter(|&i| weight[i] != 0.0)
            .map(|i| weight[i] * (-0.5 * e[i] * e[i] - guide.log_scale[i] - 0.918_938_533_204_672_7))
            .sum();
        total += lp - log_q;
        let (gm, gs) = grad.split_at_mut(dim);
        for i in (0..dim).filter(|&i| weight[i] != 0.0) {
            let s = guide.log_scale[i].exp();
            let (dm, ds) = match estimator {
                GradientEstimator::Reparameterized => (g[i], g[i] * s * e[i] + weight[i]),
                GradientEstimator::PathDerivative => {
                    (g[i] + weight[i] * e[i] / s, g[i] * s * e[i] + weight[i] * e[i] * e[i])
                }
            };
            gm[i] += dm * inv_n;
            gs[i] += ds * inv_n;
        }
    }
    total * inv_n
}

fn run_restart(model: &ClimateModel<'_>, config: &FitConfig, index: usize) -> Result<RestartOutcome> {
    let dim = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, index as u64, 0));
    let init = GuideState::init(dim, &mut rng);
    let mut packed = init.to_vec();
    let mut guide = init;
    let mut adam = AdamState::new(2 * dim);
    let mut grad = vec![0.0; 2 * dim];
    let mut trace = Vec::with_capacity(config.n_steps);
    let window = config.smoothing_window;
    let n_users = model.users().len();
    let batch_size = config
        .minibatch_fraction
        .map(|f| ((f * n_users as f64).ceil() as usize).clamp(1, n_users.max(1)));

    let mut diverged = None;
    let mut prev_window: Option<f64> = None;
    for step in 0..config.n_steps {
        let eps = fill_noise(&mut rng, dim * config.mc_samples_per_step);
        let elbo = match batch_size {
            Some(b) if b < n_users => {
                let mut batch = sample_indices(&mut rng, n_users, b).into_vec();
                batch.sort_unstable();
                let scale = n_users as f64 / b as f64;
                batch_elbo_and_gradient(model, &guide, &eps, &batch, scale, config.estimator, &mut grad)
            }
            _ => elbo_and_gradient_with_noise(model, &guide, &eps, config.estimator, &mut grad),
        };
        if !elbo.is_finite() {
            diverged = Some(format!("non-finite ELBO at step {step}"));
            break;
        }
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            diverged = Some(format!("non-finite gradient at coordinate {i}, step {step}"));
            break;
        }
        trace.push(elbo);
        adam.step(&mut packed, &grad, config.learning_rate);
        let (m, s) = packed.split_at(dim);
        guide.mean.copy_from_slice(m);
        guide.log_scale.copy_from_slice(s);

        if (step + 1) % window == 0 {
            let current = trace[trace.len() - window..].iter().sum::<f64>() / window as f64;
            if let (Some(tol), Some(prev)) = (config.early_stop_rel_tol, prev_window) {
                if current - prev < tol * prev.abs() {
                    break;
                }
            }
            prev_window = Some(current);
        }
    }

    let tail = &trace[trace.len().saturating_sub(window)..];
    let final_elbo = if tail.is_empty() {
        f64::NAN
    } else {
        tail.iter().sum::<f64>() / tail.len() as f64
    };
    if let Some(message) = diverged {
        return Ok(RestartOutcome {
            record: RestartRecord {
                index,
                elbo: final_elbo,
                accuracy: f64::NAN,
                accuracy_sd: f64::NAN,
                steps: trace.len(),
                diverged: true,
                message: Some(message),
            },
            guide,
            trace,
            accuracy_samples: Vec::new(),
        });
    }

    orient_guide(model, &mut guide);
    let samples = predictive_accuracy_samples(
        model,
        &guide,
        config.n_predictive_samples,
        derive_seed(config.seed, index as u64, 1),
    )?;
    let (accuracy, accuracy_sd) = mean_sd(&samples);
    Ok(RestartOutcome {
        record: RestartRecord {
            index,
            elbo: final_elbo,
            accuracy,
            accuracy_sd,
            steps: trace.len(),
            diverged: false,
            message: None,
        },
        guide,
        trace,
        accuracy_samples: samples,
    })
}

pub(crate) fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

/// Fits the network with `structure` to `data` by SVI.
///
/// Runs `config.n_restarts` independent restarts, each with its own RNG
/// stream derived from `config.seed`, and keeps the restart with the highest
/// posterior predictive accuracy (ties go to the higher final ELBO).
pub fn fit(data: &Dataset, hyper: &Hyperparameters, structure: &Structure, config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    let hyper = Hyperparameters {
        var_s: config.var_s,
        ..*hyper
    };
    if data.n_users() < 2 {
        return Err(Error::invalid("data", "need at least 2 users"));
    }
    let n_active = data.users.iter().filter(|u| u.activated).count();
    if n_active == 0 || n_active == data.n_users() {
        return Err(Error::invalid("data", "need at least one activated and one non-activated user"));
    }
    let model = ClimateModel::new(&data.catalog, &data.users, hyper, structure.clone())?;

    let outcomes: Vec<Result<RestartOutcome>> =
        (0..config.n_restarts).into_par_iter().map(|r| run_restart(&model, config, r)).collect();
    let outcomes: Vec<RestartOutcome> = outcomes.into_iter().collect::<Result<_>>()?;

    let best = outcomes
        .iter()
        .filter(|o| !o.record.diverged)
        .max_by(|a, b| {
            a.record
                .accuracy
                .total_cmp(&b.record.accuracy)
                .then(a.record.elbo.total_cmp(&b.record.elbo))
                // prefer the lower index on exact ties
                .then(b.record.index.cmp(&a.record.index))
        })
        .map(|o| o.record.index);
    let Some(best) = best else {
        let diagnostics = outcomes
            .iter()
            .map(|o| format!("restart {}: {}", o.record.index, o.record.message.clone().unwrap_or_default()))
            .collect();
        return Err(Error::Diverged { diagnostics });
    };

    let names = parameter_names();
    let chosen = &outcomes[best];
    let guide = chosen.guide.clone();
    let parameters = model
        .param_slots()
        .iter()
        .enumerate()
        .map(|(c, &slot)| {
            let mean = guide.mean[c];
            let sd = guide.scale(c);
            ParameterSummary {
                name: names[slot].clone(),
                equation: parameter_equation(slot).label().to_string(),
                mean,
                sd,
                ci_low: mean - Z_95 * sd,
                ci_high: mean + Z_95 * sd,
            }
        })
        .collect();
    let latents = data
        .users
        .iter()
        .enumerate()
        .map(|(u, user)| {
            let c = model.sympathy_coord(u);
            LatentSummary {
                user_id: user.id.clone(),
                activated: user.activated,
                sympathy_mean: guide.mean[c],
                sympathy_sd: guide.scale(c),
                demographics_mean: model
                    .demographics_coord(u)
                    .map(|d| [guide.mean[d], guide.mean[d + 1], guide.mean[d + 2], guide.mean[d + 3]]),
            }
        })
        .collect();

    Ok(FitResult {
        structure: structure.clone(),
        var_s: hyper.var_s,
        n_users: data.n_users(),
        seed: config.seed,
        parameters,
        restarts: outcomes.iter().map(|o| o.record.clone()).collect(),
        best_restart: best,
        accuracy_samples: chosen.accuracy_samples.clone(),
        elbo_trace: chosen.trace.clone(),
        best_guide: guide,
        latents,
    })
}
