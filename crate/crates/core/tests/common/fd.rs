use climact::inference::{elbo_estimate, elbo_gradient, GradientEstimator, GuideState, Objective};

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Relative error of every coordinate of `elbo_gradient` (means, then log
/// scales) against central differences of `elbo_estimate` at the same seed.
pub fn elbo_gradient_errors(obj: &dyn Objective, guide: &GuideState, n_samples: usize, seed: u64, h: f64) -> Vec<f64> {
    let grad = elbo_gradient(obj, guide, n_samples, seed, GradientEstimator::Reparameterized).unwrap();
    let dim = guide.dim();
    (0..2 * dim)
        .map(|i| {
            let mut plus = guide.clone();
            let mut minus = guide.clone();
            if i < dim {
                plus.mean[i] += h;
                minus.mean[i] -= h;
            } else {
                plus.log_scale[i - dim] += h;
                minus.log_scale[i - dim] -= h;
            }
            let fd = (elbo_estimate(obj, &plus, n_samples, seed).unwrap()
                - elbo_estimate(obj, &minus, n_samples, seed).unwrap())
                / (2.0 * h);
            rel_err(grad[i], fd)
        })
        .collect()
}
