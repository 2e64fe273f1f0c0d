mod common;

use climact::inference::{
    draw_noise, elbo_and_gradient_with_noise, elbo_estimate, elbo_gradient, elbo_with_noise, AdamState,
    GradientEstimator, GuideState, Objective,
};
use climact::model::{ClimateModel, Hyperparameters, ModelParameters, Structure, SubredditCatalog, UserObservation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Independent scalar means with Normal priors and Gaussian observations.
struct Conjugate {
    prior_mean: Vec<f64>,
    prior_var: Vec<f64>,
    noise_var: f64,
    obs: Vec<Vec<f64>>,
}

impl Objective for Conjugate {
    fn dim(&self) -> usize {
        self.prior_mean.len()
    }

    fn log_density_and_grad(&self, z: &[f64], grad: &mut [f64]) -> f64 {
        let mut lp = 0.0;
        for i in 0..z.len() {
            let r = z[i] - self.prior_mean[i];
            lp += -0.5 * (LN_2PI + self.prior_var[i].ln()) - 0.5 * r * r / self.prior_var[i];
            grad[i] = -r / self.prior_var[i];
            for y in &self.obs[i] {
                let r = y - z[i];
                lp += -0.5 * (LN_2PI + self.noise_var.ln()) - 0.5 * r * r / self.noise_var;
                grad[i] += r / self.noise_var;
            }
        }
        lp
    }
}

impl Conjugate {
    fn posterior(&self) -> GuideState {
        let (mut mean, mut log_scale) = (Vec::new(), Vec::new());
        for i in 0..self.dim() {
            let n = self.obs[i].len() as f64;
            let v = 1.0 / (1.0 / self.prior_var[i] + n / self.noise_var);
            let m = v * (self.prior_mean[i] / self.prior_var[i] + self.obs[i].iter().sum::<f64>() / self.noise_var);
            mean.push(m);
            log_scale.push(0.5 * v.ln());
        }
        GuideState::new(mean, log_scale).unwrap()
    }

    /// Marginal likelihood of y ~ N(m 1, s I + t 1 1') per coordinate.
    fn log_evidence(&self) -> f64 {
        let s = self.noise_var;
        (0..self.dim())
            .map(|i| {
                let t = self.prior_var[i];
                let r: Vec<f64> = self.obs[i].iter().map(|y| y - self.prior_mean[i]).collect();
                let n = r.len() as f64;
                let sum: f64 = r.iter().sum();
                let sq: f64 = r.iter().map(|v| v * v).sum();
                let logdet = (n - 1.0) * s.ln() + (s + n * t).ln();
                let quad = (sq - t * sum * sum / (s + n * t)) / s;
                -0.5 * (n * LN_2PI + logdet + quad)
            })
            .sum()
    }
}

fn conjugate() -> Conjugate {
    Conjugate {
        prior_mean: vec![0.0, 1.0, -2.0],
        prior_var: vec![1.0, 4.0, 0.5],
        noise_var: 0.7,
        obs: vec![vec![0.3, 1.1, -0.2, 0.8], vec![2.5], vec![-1.0, -1.5, -3.0]],
    }
}

fn per_sample(obj: &dyn Objective, guide: &GuideState, n: usize, seed: u64) -> (f64, f64) {
    let eps = draw_noise(guide.dim(), n, seed);
    let v: Vec<f64> = eps.chunks(guide.dim()).map(|e| elbo_with_noise(obj, guide, e)).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

#[test]
fn elbo_at_conjugate_posterior_equals_log_evidence() {
    let c = conjugate();
    let guide = c.posterior();
    let want = c.log_evidence();
    let got = elbo_estimate(&c, &guide, 10_000, 3).unwrap();
    let (mean, se) = per_sample(&c, &guide, 10_000, 3);
    assert!((got - mean).abs() < 1e-9);
    assert!((got - want).abs() <= 3.0 * se + 1e-9, "{got} vs {want} (se {se})");

    // Any other guide is strictly worse.
    let mut off = guide.clone();
    off.mean[1] += 0.3;
    let (m, se) = per_sample(&c, &off, 10_000, 4);
    assert!(m + 3.0 * se < want);
}

#[test]
fn path_derivative_gradient_vanishes_at_conjugate_posterior() {
    let c = conjugate();
    let guide = c.posterior();
    let g = elbo_gradient(&c, &guide, 10_000, 5, GradientEstimator::PathDerivative).unwrap();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(norm < 1e-3, "norm {norm}");

    // The total-derivative estimator is unbiased but noisy at the optimum.
    let g = elbo_gradient(&c, &guide, 10_000, 5, GradientEstimator::Reparameterized).unwrap();
    for (i, v) in g.iter().enumerate() {
        assert!(v.abs() < 0.2, "coordinate {i}: {v}");
    }
}

#[test]
fn elbo_without_observations_is_negative_kl() {
    let prior_mean = vec![0.5, -1.0, 0.0, 2.0];
    let prior_var = vec![1.0, 0.25, 3.0, 1.5];
    let c = Conjugate {
        prior_mean: prior_mean.clone(),
        prior_var: prior_var.clone(),
        noise_var: 1.0,
        obs: vec![vec![]; 4],
    };
    let guide = GuideState::new(vec![0.0, 0.3, -1.2, 1.0], vec![-0.5, 0.2, 0.0, -1.0]).unwrap();
    let kl: f64 = (0..4)
        .map(|i| {
            let s2 = (2.0 * guide.log_scale[i]).exp();
            let d = guide.mean[i] - prior_mean[i];
            0.5 * ((prior_var[i] / s2).ln() + (s2 + d * d) / prior_var[i] - 1.0)
        })
        .sum();
    assert!((guide.kl_to_normal(&prior_mean, &prior_var) - kl).abs() < 1e-12);
    let (mean, se) = per_sample(&c, &guide, 10_000, 8);
    assert!((mean + kl).abs() < 3.0 * se, "{mean} vs {}", -kl);
}

#[test]
fn model_without_users_gives_negative_kl_to_priors() {
    let cat = SubredditCatalog::new(vec!["a".into()], vec![[0.1, 0.2, 0.3, 0.4]], vec![0.0]).unwrap();
    let users: Vec<UserObservation> = Vec::new();
    let h = Hyperparameters::default();
    let model = ClimateModel::new(&cat, &users, h, Structure::full()).unwrap();
    assert_eq!(model.dim(), 39);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let guide = GuideState::init(39, &mut rng);
    let prior_mean: Vec<f64> = (0..39).map(|s| h.prior_mean(s)).collect();
    let kl = guide.kl_to_normal(&prior_mean, &vec![h.prior_var; 39]);
    let (mean, se) = per_sample(&model, &guide, 10_000, 2);
    assert!((mean + kl).abs() < 3.0 * se, "{mean} vs {}", -kl);
}

fn sigm(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn bern(y: bool, p: f64) -> f64 {
    if y {
        p
    } else {
        1.0 - p
    }
}

/// log p(observations | params) by trapezoid quadrature over (D, S) in
/// standardized coordinates, one user at a time.
fn quadrature_log_evidence(p: &ModelParameters, cat: &SubredditCatalog, users: &[UserObservation], var_s: f64) -> f64 {
    let n = 21;
    let half = 7.0;
    let h = 2.0 * half / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| -half + h * i as f64).collect();
    let w: Vec<f64> = grid.iter().map(|x| h * (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()).collect();
    let sc = cat.scores();
    let pop = cat.popularity();
    let mut total = 0.0;
    for u in users {
        let mut acc = 0.0;
        let es_term = {
            let r = u.e_short - (p.beta_e1 * u.e_long + p.beta_e0);
            (-0.5 * r * r / p.theta_e).exp() / (2.0 * std::f64::consts::PI * p.theta_e).sqrt()
        };
        let mut q = [0.0; 4];
        for k in 0..cat.len() {
            if u.p_short[k] {
                for j in 0..4 {
                    q[j] += sc[k][j];
                }
            }
        }
        let i_eta = (0..4).map(|j| p.beta_i1[j] * q[j]).sum::<f64>() + p.beta_i2 * u.e_short + p.beta_i0;
        let i_term = bern(u.interacted, sigm(i_eta));
        for (a, wa) in grid.iter().zip(&w) {
            for (b, wb) in grid.iter().zip(&w) {
                for (c, wc) in grid.iter().zip(&w) {
                    for (d4, wd) in grid.iter().zip(&w) {
                        let d = [*a, *b, *c, *d4];
                        let wd_all = wa * wb * wc * wd;
                        let mut lik = 1.0;
                        for k in 0..cat.len() {
                            let dd: f64 = (0..4).map(|j| sc[k][j] * d[j]).sum();
                            let eta = p.beta_p_long1 * dd
                                + p.beta_p_long2 * pop[k]
                                + p.beta_p_long3 * u.e_long
                                + p.beta_p_long0;
                            lik *= bern(u.p_long[k], sigm(eta));
                        }
                        let ms = (0..4).map(|j| p.beta_s1[j] * d[j]).sum::<f64>()
                            + p.beta_s2 * u.e_long
                            + (0..3).map(|t| p.beta_s3[t] * u.m_long[t]).sum::<f64>();
                        let mut inner = 0.0;
                        for (t, wt) in grid.iter().zip(&w) {
                            let s = ms + var_s.sqrt() * t;
                            let mut l2 = 1.0;
                            for k in 0..cat.len() {
                                let load: f64 = (0..4).map(|j| p.beta_p_short1[j] * sc[k][j]).sum();
                                let pl = if u.p_long[k] { 1.0 } else { 0.0 };
                                let eta = s * load
                                    + p.beta_p_short2 * pl
                                    + p.beta_p_short3 * pop[k]
                                    + p.beta_p_short4 * u.e_short
                                    + p.beta_p_short0;
                                l2 *= bern(u.p_short[k], sigm(eta));
                            }
                            let i = if u.interacted { 1.0 } else { 0.0 };
                            let a_eta = p.beta_a1 * s
                                + p.beta_a2 * i
                                + (0..3).map(|t| p.beta_a3[t] * u.m_short[t] + p.beta_a4[t] * u.m_long[t]).sum::<f64>()
                                + p.beta_a5 * u.e_short
                                + p.beta_a0;
                            l2 *= bern(u.activated, sigm(a_eta));
                            inner += wt * l2;
                        }
                        acc += wd_all * lik * inner;
                    }
                }
            }
        }
        total += (acc * es_term * i_term).ln();
    }
    total
}

#[test]
fn elbo_bounds_quadrature_evidence() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cat = SubredditCatalog::new(
        vec!["a".into(), "b".into()],
        vec![[0.8, -0.5, 0.3, 1.0], [-0.4, 0.9, -1.1, 0.2]],
        vec![0.6, -0.3],
    )
    .unwrap();
    let users = common::random_users(&mut rng, 2, 2);
    let p = common::random_params(&mut rng, 1.0);
    let var_s = 1.0;
    let want = quadrature_log_evidence(&p, &cat, &users, var_s);

    let model = ClimateModel::new(&cat, &users, Hyperparameters::with_var_s(var_s), Structure::full())
        .unwrap()
        .with_fixed_params(&p)
        .unwrap();
    assert_eq!(model.dim(), 10);

    // Prior-like and arbitrary guides.
    for seed in 0..5 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let guide = GuideState::init(10, &mut r);
        let (m, se) = per_sample(&model, &guide, 10_000, seed);
        assert!(m <= want + 3.0 * se, "{m} > {want}");
    }

    // A guide optimized with Adam gets close to, but never above, the evidence.
    let mut guide = GuideState::new(vec![0.0; 10], vec![0.0; 10]).unwrap();
    let mut packed = guide.to_vec();
    let mut adam = AdamState::new(20);
    let mut grad = vec![0.0; 20];
    let mut r = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3000 {
        let eps: Vec<f64> = draw_noise(10, 8, rand::Rng::random(&mut r));
        elbo_and_gradient_with_noise(&model, &guide, &eps, GradientEstimator::PathDerivative, &mut grad);
        adam.step(&mut packed, &grad, 0.01);
        guide = GuideState::from_vec(&packed).unwrap();
    }
    let (m, se) = per_sample(&model, &guide, 20_000, 123);
    println!("optimized ELBO {m} ± {se}, evidence {want}");
    assert!(m <= want + 3.0 * se);
    assert!(want - m < 0.5, "gap {}", want - m);
}
