use crate::error::{Error, Result};

/// Standardizes to mean 0 and sample standard deviation 1 (n - 1 denominator).
pub fn zscore(values: &[f64]) -> Result<Vec<f64>> {
    zscore_named(values, "vector")
}

pub(crate) fn zscore_named(values: &[f64], what: &str) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::invalid(what, format!("need at least 2 values to z-score, got {}", values.len())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(what, "non-finite value"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) || sd <= f64::EPSILON * mean.abs() {
        return Err(Error::ZeroVariance { what: what.into() });
    }
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}
