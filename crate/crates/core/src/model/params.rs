use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sociodemographic axes of the subreddit score matrix, in column order.
pub const AXES: [&str; 4] = ["affluence", "partisanship", "gender", "age"];

/// Media themes, in vector order.
pub const THEMES: [&str; 3] = ["climate", "climate_action", "natural_disasters"];

/// Number of scalar model parameters in the flat layout.
pub const N_PARAMS: usize = 39;

// Flat parameter layout. `theta_E` is stored as a log-variance.
pub(crate) const E0: usize = 0;
pub(crate) const E1: usize = 1;
pub(crate) const LOG_THETA_E: usize = 2;
pub(crate) const P0: usize = 3;
pub(crate) const P1: usize = 4;
pub(crate) const P2: usize = 5;
pub(crate) const P3: usize = 6;
pub(crate) const S1: usize = 7;
pub(crate) const S2: usize = 11;
pub(crate) const S3: usize = 12;
pub(crate) const PS0: usize = 15;
pub(crate) const PS1: usize = 16;
pub(crate) const PS2: usize = 20;
pub(crate) const PS3: usize = 21;
pub(crate) const PS4: usize = 22;
pub(crate) const I0: usize = 23;
pub(crate) const I1: usize = 24;
pub(crate) const I2: usize = 28;
pub(crate) const A0: usize = 29;
pub(crate) const A1: usize = 30;
pub(crate) const A2: usize = 31;
pub(crate) const A3: usize = 32;
pub(crate) const A4: usize = 35;
pub(crate) const A5: usize = 38;

/// Which node equation a parameter belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Equation {
    /// Short-term engagement given long-term engagement.
    Engagement,
    /// Long-term subreddit participation.
    LongParticipation,
    /// Sympathy.
    Sympathy,
    /// Short-term subreddit participation.
    ShortParticipation,
    /// Interaction with an activist.
    Interaction,
    /// Activation.
    Activation,
}

impl Equation {
    pub fn label(self) -> &'static str {
        match self {
            Equation::Engagement => "engagement",
            Equation::LongParticipation => "long_participation",
            Equation::Sympathy => "sympathy",
            Equation::ShortParticipation => "short_participation",
            Equation::Interaction => "interaction",
            Equation::Activation => "activation",
        }
    }
}

/// Name and owning equation of every slot in the flat layout.
pub fn parameter_names() -> Vec<String> {
    let mut names = Vec::with_capacity(N_PARAMS);
    names.extend(["beta_E0", "beta_E1", "log_theta_E"].map(String::from));
    names.extend(["beta_P0", "beta_P1", "beta_P2", "beta_P3"].map(String::from));
    names.extend(AXES.iter().map(|a| format!("beta_S1[{a}]")));
    names.push("beta_S2".into());
    names.extend(THEMES.iter().map(|t| format!("beta_S3[{t}]")));
    names.push("beta_p0".into());
    names.extend(AXES.iter().map(|a| format!("beta_p1[{a}]")));
    names.extend(["beta_p2", "beta_p3", "beta_p4"].map(String::from));
    names.push("beta_I0".into());
    names.extend(AXES.iter().map(|a| format!("beta_I1[{a}]")));
    names.push("beta_I2".into());
    names.extend(["beta_A0", "beta_A1", "beta_A2"].map(String::from));
    names.extend(THEMES.iter().map(|t| format!("beta_A3[{t}]")));
    names.extend(THEMES.iter().map(|t| format!("beta_A4[{t}]")));
    names.push("beta_A5".into());
    debug_assert_eq!(names.len(), N_PARAMS);
    names
}

pub fn parameter_equation(index: usize) -> Equation {
    match index {
        E0..=LOG_THETA_E => Equation::Engagement,
        P0..=P3 => Equation::LongParticipation,
        S1..=14 => Equation::Sympathy,
        PS0..=PS4 => Equation::ShortParticipation,
        I0..=I2 => Equation::Interaction,
        _ => Equation::Activation,
    }
}

/// Every coefficient of the six node equations.
///
/// `theta_e` is the variance of the engagement equation. Vectors indexed by
/// sociodemographic axis follow [`AXES`]; vectors indexed by theme follow
/// [`THEMES`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParameters {
    pub beta_e0: f64,
    pub beta_e1: f64,
    pub theta_e: f64,

    pub beta_p_long0: f64,
    pub beta_p_long1: f64,
    pub beta_p_long2: f64,
    pub beta_p_long3: f64,

    pub beta_s1: [f64; 4],
    pub beta_s2: f64,
    pub beta_s3: [f64; 3],

    pub beta_p_short0: f64,
    pub beta_p_short1: [f64; 4],
    pub beta_p_short2: f64,
    pub beta_p_short3: f64,
    pub beta_p_short4: f64,

    pub beta_i0: f64,
    pub beta_i1: [f64; 4],
    pub beta_i2: f64,

    pub beta_a0: f64,
    pub beta_a1: f64,
    pub beta_a2: f64,
    pub beta_a3: [f64; 3],
    pub beta_a4: [f64; 3],
    pub beta_a5: f64,
}

impl Default for ModelParameters {
    /// All coefficients zero, unit engagement variance.
    fn default() -> Self {
        Self {
            beta_e0: 0.0,
            beta_e1: 0.0,
            theta_e: 1.0,
            beta_p_long0: 0.0,
            beta_p_long1: 0.0,
            beta_p_long2: 0.0,
            beta_p_long3: 0.0,
            beta_s1: [0.0; 4],
            beta_s2: 0.0,
            beta_s3: [0.0; 3],
            beta_p_short0: 0.0,
            beta_p_short1: [0.0; 4],
            beta_p_short2: 0.0,
            beta_p_short3: 0.0,
            beta_p_short4: 0.0,
            beta_i0: 0.0,
            beta_i1: [0.0; 4],
            beta_i2: 0.0,
            beta_a0: 0.0,
            beta_a1: 0.0,
            beta_a2: 0.0,
            beta_a3: [0.0; 3],
            beta_a4: [0.0; 3],
            beta_a5: 0.0,
        }
    }
}

impl ModelParameters {
    /// A moderately informative parameter set with every edge switched on,
    /// used by `simulate` when no parameter file is given.
    pub fn example() -> Self {
        Self {
            beta_e0: 0.1,
            beta_e1: 0.6,
            theta_e: 0.25,
            beta_p_long0: -1.0,
            beta_p_long1: 0.8,
            beta_p_long2: 1.0,
            beta_p_long3: 0.3,
            beta_s1: [0.5, -0.4, 0.3, 0.2],
            beta_s2: 0.4,
            beta_s3: [0.3, 0.2, -0.2],
            beta_p_short0: -1.5,
            beta_p_short1: [0.4, -0.3, 0.2, 0.1],
            beta_p_short2: 1.0,
            beta_p_short3: 0.5,
            beta_p_short4: 0.3,
            beta_i0: -0.5,
            beta_i1: [0.3, -0.2, 0.1, 0.2],
            beta_i2: 0.4,
            beta_a0: -0.5,
            beta_a1: 1.0,
            beta_a2: 1.0,
            beta_a3: [0.2, -0.1, 0.1],
            beta_a4: [0.1, 0.0, -0.1],
            beta_a5: 0.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_e > 0.0) || !self.theta_e.is_finite() {
            return Err(Error::invalid("theta_E", format!("must be a positive finite variance, got {}", self.theta_e)));
        }
        let flat = self.to_flat();
        if let Some(i) = flat.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(parameter_names()[i].clone(), "non-finite"));
        }
        Ok(())
    }

    /// Packs into the flat layout (engagement variance as log-variance).
    pub fn to_flat(&self) -> [f64; N_PARAMS] {
        let mut f = [0.0; N_PARAMS];
        f[E0] = self.beta_e0;
        f[E1] = self.beta_e1;
        f[LOG_THETA_E] = self.theta_e.ln();
        f[P0] = self.beta_p_long0;
        f[P1] = self.beta_p_long1;
        f[P2] = self.beta_p_long2;
        f[P3] = self.beta_p_long3;
        f[S1..S1 + 4].copy_from_slice(&self.beta_s1);
        f[S2] = self.beta_s2;
        f[S3..S3 + 3].copy_from_slice(&self.beta_s3);
        f[PS0] = self.beta_p_short0;
        f[PS1..PS1 + 4].copy_from_slice(&self.beta_p_short1);
        f[PS2] = self.beta_p_short2;
        f[PS3] = self.beta_p_short3;
        f[PS4] = self.beta_p_short4;
        f[I0] = self.beta_i0;
        f[I1..I1 + 4].copy_from_slice(&self.beta_i1);
        f[I2] = self.beta_i2;
        f[A0] = self.beta_a0;
        f[A1] = self.beta_a1;
        f[A2] = self.beta_a2;
        f[A3..A3 + 3].copy_from_slice(&self.beta_a3);
        f[A4..A4 + 3].copy_from_slice(&self.beta_a4);
        f[A5] = self.beta_a5;
        f
    }

    pub fn from_flat(f: &[f64]) -> Result<Self> {
        if f.len() != N_PARAMS {
            return Err(Error::dim("flat parameter vector", N_PARAMS, f.len()));
        }
        let arr4 = |at: usize| [f[at], f[at + 1], f[at + 2], f[at + 3]];
        let arr3 = |at: usize| [f[at], f[at + 1], f[at + 2]];
        Ok(Self {
            beta_e0: f[E0],
            beta_e1: f[E1],
            theta_e: f[LOG_THETA_E].exp(),
            beta_p_long0: f[P0],
            beta_p_long1: f[P1],
            beta_p_long2: f[P2],
            beta_p_long3: f[P3],
            beta_s1: arr4(S1),
            beta_s2: f[S2],
            beta_s3: arr3(S3),
            beta_p_short0: f[PS0],
            beta_p_short1: arr4(PS1),
            beta_p_short2: f[PS2],
            beta_p_short3: f[PS3],
            beta_p_short4: f[PS4],
            beta_i0: f[I0],
            beta_i1: arr4(I1),
            beta_i2: f[I2],
            beta_a0: f[A0],
            beta_a1: f[A1],
            beta_a2: f[A2],
            beta_a3: arr3(A3),
            beta_a4: arr3(A4),
            beta_a5: f[A5],
        })
    }
}

/// Prior and regime settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Fixed variance of the sympathy equation.
    pub var_s: f64,
    /// Prior mean of the two popularity coefficients.
    pub prior_mean_popularity: f64,
    /// Prior variance of every coefficient.
    pub prior_var: f64,
    /// Prior mean of every other coefficient.
    pub prior_mean_default: f64,
}

/// Sympathy-variance regimes swept by default.
pub const DEFAULT_VAR_S_SWEEP: [f64; 3] = [0.01, 1.0, 100.0];

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            var_s: 1.0,
            prior_mean_popularity: 1.0,
            prior_var: 1.0,
            prior_mean_default: 0.0,
        }
    }
}

impl Hyperparameters {
    pub fn with_var_s(var_s: f64) -> Self {
        Self {
            var_s,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.var_s > 0.0 && self.var_s.is_finite()) {
            return Err(Error::invalid("var_S", format!("must be in (0, inf), got {}", self.var_s)));
        }
        if !(self.prior_var > 0.0 && self.prior_var.is_finite()) {
            return Err(Error::invalid("prior_var", format!("must be in (0, inf), got {}", self.prior_var)));
        }
        if !(self.prior_mean_popularity > 0.0 && self.prior_mean_popularity.is_finite()) {
            return Err(Error::invalid(
                "prior_mean_popularity",
                format!("must be positive, got {}", self.prior_mean_popularity),
            ));
        }
        if !self.prior_mean_default.is_finite() {
            return Err(Error::invalid("prior_mean_default", "non-finite"));
        }
        Ok(())
    }

    /// Prior mean of flat slot `index`.
    pub fn prior_mean(&self, index: usize) -> f64 {
        match index {
            P2 | PS3 => self.prior_mean_popularity,
            _ => self.prior_mean_default,
        }
    }
}
