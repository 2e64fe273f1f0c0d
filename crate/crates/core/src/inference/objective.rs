/// A differentiable unnormalized log density over a flat coordinate vector.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    /// Returns the log density at `z` and writes its gradient into `grad`.
    fn log_density_and_grad(&self, z: &[f64], grad: &mut [f64]) -> f64;

    fn log_density(&self, z: &[f64]) -> f64 {
        let mut grad = vec![0.0; self.dim()];
        self.log_density_and_grad(z, &mut grad)
    }
}
