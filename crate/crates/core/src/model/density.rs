//! Log joint density of the network and its gradient.
//!
//! The evaluator works on a flat coordinate vector: the free model
//! parameters (in flat-layout order, restricted to the slots active in the
//! [`Structure`]) followed by the per-user latents. Each user contributes four
//! sociodemographic entries (unless that group is removed) and a sympathy
//! scalar. Gradients are derived by hand from the node equations.

use std::f64::consts::PI;

use super::data::{LatentState, SubredditCatalog, UserObservation};
use super::nodes::dot;
use super::params::*;
use super::structure::{Structure, VariableGroup};
use crate::error::{Error, Result};
use crate::inference::Objective;

/// Log-mass and residual `y - sigmoid(eta)` of a Bernoulli node.
#[inline(always)]
fn bernoulli_term(y: bool, eta: f64) -> (f64, f64) {
    let e = (-eta.abs()).exp();
    let softplus = eta.max(0.0) + e.ln_1p();
    let sig = if eta >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
    if y {
        (eta - softplus, 1.0 - sig)
    } else {
        (-softplus, -sig)
    }
}

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// The network bound to a catalog, a set of users and a prior regime.
#[derive(Clone, Debug)]
pub struct ClimateModel<'a> {
    catalog: &'a SubredditCatalog,
    users: &'a [UserObservation],
    hyper: Hyperparameters,
    structure: Structure,
    fixed_params: Option<[f64; N_PARAMS]>,
    param_slots: Vec<usize>,
    short_sums: Vec<[f64; 4]>,
    stride: usize,
}

impl<'a> ClimateModel<'a> {
    pub fn new(
        catalog: &'a SubredditCatalog,
        users: &'a [UserObservation],
        hyper: Hyperparameters,
        structure: Structure,
    ) -> Result<Self> {
        hyper.validate()?;
        for u in users {
            u.validate(catalog.len())?;
        }
        let active = structure.active_params();
        let param_slots = (0..N_PARAMS).filter(|&i| active[i]).collect();
        let short_sums = users.iter().map(|u| u.short_score_sum(catalog)).collect();
        let stride = structure.latent_stride();
        Ok(Self {
            catalog,
            users,
            hyper,
            structure,
            fixed_params: None,
            param_slots,
            short_sums,
            stride,
        })
    }

    /// Holds the parameters at `params`; only the latents remain free.
    pub fn with_fixed_params(mut self, params: &ModelParameters) -> Result<Self> {
        params.validate()?;
        let mut flat = params.to_flat();
        let active = self.structure.active_params();
        for (v, a) in flat.iter_mut().zip(active) {
            if !a {
                *v = 0.0;
            }
        }
        self.fixed_params = Some(flat);
        self.param_slots.clear();
        Ok(self)
    }

    pub fn catalog(&self) -> &SubredditCatalog {
        self.catalog
    }

    pub fn users(&self) -> &[UserObservation] {
        self.users
    }

    pub fn hyper(&self) -> &Hyperparameters {
        &self.hyper
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    /// Flat-layout slots of the free parameter coordinates, in coordinate order.
    pub fn param_slots(&self) -> &[usize] {
        &self.param_slots
    }

    pub fn n_param_coords(&self) -> usize {
        self.param_slots.len()
    }

    /// Latent coordinates per user.
    pub fn latent_stride(&self) -> usize {
        self.stride
    }

    /// Coordinate of user `u`'s sympathy.
    pub fn sympathy_coord(&self, u: usize) -> usize {
        self.n_param_coords() + u * self.stride + self.stride - 1
    }

    /// Coordinate of user `u`'s first sociodemographic entry, if present.
    pub fn demographics_coord(&self, u: usize) -> Option<usize> {
        (self.stride == 5).then(|| self.n_param_coords() + u * self.stride)
    }

    /// Expands free coordinates into the full flat parameter vector.
    pub fn flat_params(&self, z: &[f64]) -> [f64; N_PARAMS] {
        let mut flat = self.fixed_params.unwrap_or([0.0; N_PARAMS]);
        for (c, &slot) in self.param_slots.iter().enumerate() {
            flat[slot] = z[c];
        }
        flat
    }

    /// Packs parameters and latents into free coordinates.
    pub fn pack(&self, params: &ModelParameters, latents: &LatentState) -> Result<Vec<f64>> {
        latents.validate(self.users.len())?;
        let flat = params.to_flat();
        let mut z: Vec<f64> = self.param_slots.iter().map(|&s| flat[s]).collect();
        for (d, &s) in latents.demographics.iter().zip(&latents.sympathy) {
            if self.stride == 5 {
                z.extend_from_slice(d);
            }
            z.push(s);
        }
        Ok(z)
    }

    /// Log joint density at flat parameters and latents, accumulating the
    /// gradient into the two buffers (which must be zeroed by the caller).
    pub fn log_joint(
        &self,
        p: &[f64; N_PARAMS],
        latents: &[f64],
        gp: &mut [f64; N_PARAMS],
        gl: &mut [f64],
    ) -> f64 {
        let lp = self.user_terms(p, latents, gp, gl, 0..self.users.len());
        lp + self.param_prior(p, gp)
    }

    fn param_prior(&self, p: &[f64; N_PARAMS], gp: &mut [f64; N_PARAMS]) -> f64 {
        if self.fixed_params.is_some() {
            return 0.0;
        }
        let pv = self.hyper.prior_var;
        let mut lp = 0.0;
        for &slot in &self.param_slots {
            let r = p[slot] - self.hyper.prior_mean(slot);
            lp -= 0.5 * (2.0 * PI * pv).ln() + 0.5 * r * r / pv;
            gp[slot] -= r / pv;
        }
        lp
    }

    /// Minibatch estimate of the log joint: parameter priors plus the terms
    /// of the users in `batch` multiplied by `scale`. Latent gradients of
    /// users outside the batch are zero.
    pub fn log_density_and_grad_batch(&self, z: &[f64], grad: &mut [f64], batch: &[usize], scale: f64) -> f64 {
        let flat = self.flat_params(z);
        let np = self.param_slots.len();
        let mut gp = [0.0; N_PARAMS];
        let (gparams, glatents) = grad.split_at_mut(np);
        glatents.fill(0.0);
        let lp_users = self.user_terms(&flat, &z[np..], &mut gp, glatents, batch.iter().copied());
        for g in gp.iter_mut() {
            *g *= scale;
        }
        for &u in batch {
            for g in &mut glatents[u * self.stride..(u + 1) * self.stride] {
                *g *= scale;
            }
        }
        let lp = scale * lp_users + self.param_prior(&flat, &mut gp);
        for (g, &slot) in gparams.iter_mut().zip(&self.param_slots) {
            *g = gp[slot];
        }
        lp
    }

    fn user_terms(
        &self,
        p: &[f64; N_PARAMS],
        latents: &[f64],
        gp: &mut [f64; N_PARAMS],
        gl: &mut [f64],
        users: impl Iterator<Item = usize>,
    ) -> f64 {
        let has_d = self.structure.has(VariableGroup::Demographics);
        let has_e = self.structure.has(VariableGroup::Engagement);
        let has_i = self.structure.has(VariableGroup::Interaction);
        let stride = self.stride;
        let scores = self.catalog.scores();
        let pops = self.catalog.popularity();

        let theta_e = p[LOG_THETA_E].exp();
        let var_s = self.hyper.var_s;
        let beta_s1 = [p[S1], p[S1 + 1], p[S1 + 2], p[S1 + 3]];
        let beta_s3 = [p[S3], p[S3 + 1], p[S3 + 2]];
        let beta_ps1 = [p[PS1], p[PS1 + 1], p[PS1 + 2], p[PS1 + 3]];
        let beta_i1 = [p[I1], p[I1 + 1], p[I1 + 2], p[I1 + 3]];
        let beta_a3 = [p[A3], p[A3 + 1], p[A3 + 2]];
        let beta_a4 = [p[A4], p[A4 + 1], p[A4 + 2]];
        let sym_loadings: Vec<f64> = scores.iter().map(|row| dot(&beta_ps1, row)).collect();

        let mut lp = 0.0;
        for u in users {
            let user = &self.users[u];
            let lat = &latents[u * stride..(u + 1) * stride];
            let gl_u = &mut gl[u * stride..(u + 1) * stride];
            let d: [f64; 4] = if has_d { [lat[0], lat[1], lat[2], lat[3]] } else { [0.0; 4] };
            let s = lat[stride - 1];
            let (el, es) = (user.e_long, user.e_short);
            let mut gd = [0.0; 4];
            let mut gs = 0.0;

            if has_d {
                lp -= 4.0 * HALF_LN_2PI + 0.5 * dot(&d, &d);
                for j in 0..4 {
                    gd[j] -= d[j];
                }
            }

            if has_e {
                let r = es - (p[E1] * el + p[E0]);
                lp -= HALF_LN_2PI + 0.5 * p[LOG_THETA_E] + 0.5 * r * r / theta_e;
                let w = r / theta_e;
                gp[E0] += w;
                gp[E1] += w * el;
                gp[LOG_THETA_E] += -0.5 + 0.5 * r * w;
            }

            // Long-term participation.
            let base = p[P3] * el + p[P0];
            let (mut r_sum, mut rc_sum, mut rpop_sum) = (0.0, 0.0, 0.0);
            let mut r_row = [0.0; 4];
            for ((row, &pop), &y) in scores.iter().zip(pops).zip(&user.p_long) {
                let c = dot(row, &d);
                let (l, r) = bernoulli_term(y, p[P1] * c + p[P2] * pop + base);
                lp += l;
                r_sum += r;
                rc_sum += r * c;
                rpop_sum += r * pop;
                if has_d {
                    for j in 0..4 {
                        r_row[j] += r * row[j];
                    }
                }
            }
            gp[P0] += r_sum;
            gp[P1] += rc_sum;
            gp[P2] += rpop_sum;
            gp[P3] += r_sum * el;
            if has_d {
                for j in 0..4 {
                    gd[j] += p[P1] * r_row[j];
                }
            }

            // Sympathy.
            let m_s = dot(&beta_s1, &d) + p[S2] * el + dot(&beta_s3, &user.m_long);
            let r = s - m_s;
            lp -= HALF_LN_2PI + 0.5 * var_s.ln() + 0.5 * r * r / var_s;
            let w = r / var_s;
            gs -= w;
            for j in 0..4 {
                gp[S1 + j] += w * d[j];
                gd[j] += w * beta_s1[j];
            }
            gp[S2] += w * el;
            for j in 0..3 {
                gp[S3 + j] += w * user.m_long[j];
            }

            // Short-term participation.
            let base = p[PS4] * es + p[PS0];
            let (mut r_sum, mut ra_sum, mut rpl_sum, mut rpop_sum) = (0.0, 0.0, 0.0, 0.0);
            let mut r_row = [0.0; 4];
            for (((row, &pop), &a), (&pl, &y)) in scores
                .iter()
                .zip(pops)
                .zip(&sym_loadings)
                .zip(user.p_long.iter().zip(&user.p_short))
            {
                let pl_f = if pl { 1.0 } else { 0.0 };
                let (l, r) = bernoulli_term(y, s * a + p[PS2] * pl_f + p[PS3] * pop + base);
                lp += l;
                r_sum += r;
                ra_sum += r * a;
                rpl_sum += r * pl_f;
                rpop_sum += r * pop;
                for j in 0..4 {
                    r_row[j] += r * row[j];
                }
            }
            gs += ra_sum;
            for j in 0..4 {
                gp[PS1 + j] += s * r_row[j];
            }
            gp[PS0] += r_sum;
            gp[PS2] += rpl_sum;
            gp[PS3] += rpop_sum;
            gp[PS4] += r_sum * es;

            if has_i {
                let q = &self.short_sums[u];
                let (l, r) = bernoulli_term(user.interacted, dot(&beta_i1, q) + p[I2] * es + p[I0]);
                lp += l;
                for j in 0..4 {
                    gp[I1 + j] += r * q[j];
                }
                gp[I2] += r * es;
                gp[I0] += r;
            }

            // Activation.
            let i_f = if user.interacted { 1.0 } else { 0.0 };
            let eta = p[A1] * s
                + p[A2] * i_f
                + dot(&beta_a3, &user.m_short)
                + dot(&beta_a4, &user.m_long)
                + p[A5] * es
                + p[A0];
            let (l, r) = bernoulli_term(user.activated, eta);
            lp += l;
            gs += r * p[A1];
            gp[A0] += r;
            gp[A1] += r * s;
            gp[A2] += r * i_f;
            for j in 0..3 {
                gp[A3 + j] += r * user.m_short[j];
                gp[A4 + j] += r * user.m_long[j];
            }
            gp[A5] += r * es;

            if has_d {
                gl_u[..4].copy_from_slice(&gd);
            }
            gl_u[stride - 1] = gs;
        }
        lp
    }
}

impl Objective for ClimateModel<'_> {
    fn dim(&self) -> usize {
        self.param_slots.len() + self.users.len() * self.stride
    }

    fn log_density_and_grad(&self, z: &[f64], grad: &mut [f64]) -> f64 {
        let flat = self.flat_params(z);
        let np = self.param_slots.len();
        let mut gp = [0.0; N_PARAMS];
        let (gparams, glatents) = grad.split_at_mut(np);
        glatents.fill(0.0);
        let lp = self.log_joint(&flat, &z[np..], &mut gp, glatents);
        for (g, &slot) in gparams.iter_mut().zip(&self.param_slots) {
            *g = gp[slot];
        }
        lp
    }
}

/// Log joint density of the full network at given parameters and latents,
/// including the priors of every parameter.
pub fn joint_log_density(
    params: &ModelParameters,
    latents: &LatentState,
    users: &[UserObservation],
    catalog: &SubredditCatalog,
    hyper: &Hyperparameters,
) -> Result<f64> {
    params.validate()?;
    latents.validate(users.len())?;
    let model = ClimateModel::new(catalog, users, *hyper, Structure::full())?;
    let z = model.pack(params, latents)?;
    let lp = model.log_density(&z);
    if lp.is_nan() {
        return Err(Error::invalid("joint log density", "evaluated to NaN"));
    }
    Ok(lp)
}
