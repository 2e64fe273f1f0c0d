use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{fit, FitConfig, FitResult};
use crate::model::{Dataset, Hyperparameters, Structure, VariableGroup, DEFAULT_VAR_S_SWEEP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationConfig {
    /// Groups removed one at a time.
    pub groups: Vec<VariableGroup>,
    pub var_s_values: Vec<f64>,
    /// Shared by every variant; `fit.var_s` is replaced by each sweep value.
    pub fit: FitConfig,
    /// Also fit the variant with every listed group removed at once.
    pub include_joint_removal: bool,
}

impl Default for AblationConfig {
    fn default() -> Self {
        Self {
            groups: VariableGroup::ALL.to_vec(),
            var_s_values: DEFAULT_VAR_S_SWEEP.to_vec(),
            fit: FitConfig::default(),
            include_joint_removal: false,
        }
    }
}

/// One row of the accuracy comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub variant: String,
    pub var_s: f64,
    pub accuracy_mean: f64,
    pub accuracy_sd: f64,
    pub n_parameters: usize,
    pub elbo: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationOutcome {
    pub rows: Vec<AblationRow>,
    pub fits: Vec<FitResult>,
}

impl AblationOutcome {
    pub fn fit_for(&self, variant: &str, var_s: f64) -> Option<&FitResult> {
        self.fits.iter().find(|f| f.structure.label() == variant && f.var_s == var_s)
    }
}

/// The structures fitted by an ablation run: the full network first, then one
/// variant per distinct group in the order given.
pub fn ablation_variants(config: &AblationConfig) -> Vec<Structure> {
    let mut groups = config.groups.clone();
    let mut seen = Vec::new();
    groups.retain(|g| {
        let fresh = !seen.contains(g);
        seen.push(*g);
        fresh
    });
    let mut out = vec![Structure::full()];
    out.extend(groups.iter().map(|&g| Structure::without([g])));
    if config.include_joint_removal && groups.len() > 1 {
        out.push(Structure::without(groups.iter().copied()));
    }
    out
}

/// Refits the network once per variant and var(S) value with an identical
/// fit configuration.
pub fn run_ablation(data: &Dataset, hyper: &Hyperparameters, config: &AblationConfig) -> Result<AblationOutcome> {
    if config.var_s_values.is_empty() {
        return Err(Error::invalid("var_s_values", "sweep is empty"));
    }
    config.fit.validate()?;
    let variants = ablation_variants(config);
    let jobs: Vec<(Structure, f64)> = variants
        .iter()
        .flat_map(|s| config.var_s_values.iter().map(move |&v| (s.clone(), v)))
        .collect();
    let fits: Vec<FitResult> = jobs
        .par_iter()
        .map(|(structure, var_s)| {
            let cfg = FitConfig {
                var_s: *var_s,
                ..config.fit.clone()
            };
            fit(data, hyper, structure, &cfg)
        })
        .collect::<Result<_>>()?;
    let rows = fits
        .iter()
        .map(|f| AblationRow {
            variant: f.structure.label(),
            var_s: f.var_s,
            accuracy_mean: f.accuracy(),
            accuracy_sd: f.best().accuracy_sd,
            n_parameters: f.parameters.len(),
            elbo: f.best().elbo,
        })
        .collect();
    Ok(AblationOutcome { rows, fits })
}
