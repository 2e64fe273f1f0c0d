use serde::{Deserialize, Serialize};

/// First and second moment estimates of the Adam optimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        Self {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    /// One bias-corrected Adam update moving `params` up the gradient.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        debug_assert_eq!(params.len(), grad.len());
        debug_assert_eq!(params.len(), self.m.len());
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for (((x, &g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *x += lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut s = AdamState::new(3);
        let mut x = vec![1.0, -2.0, 0.5];
        for _ in 0..10 {
            s.step(&mut x, &[0.0; 3], 0.05);
        }
        assert_eq!(x, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn first_step_is_lr_times_sign() {
        let mut s = AdamState::new(4);
        let mut x = vec![0.0; 4];
        let g = [3.0, -0.002, 250.0, -7.5];
        s.step(&mut x, &g, 0.05);
        for (xi, gi) in x.iter().zip(g) {
            assert!((xi - 0.05 * gi.signum()).abs() < 1e-6, "{xi}");
        }
    }

    #[test]
    fn quadratic_bowl_converges() {
        // ascend -(x - x*)^2 / 2 from x0 = 1
        let target = 0.0;
        let mut s = AdamState::new(1);
        let mut x = vec![1.0];
        for _ in 0..100 {
            let g = [-(x[0] - target)];
            s.step(&mut x, &g, 0.05);
        }
        assert!((x[0] - target).abs() < 1e-2, "x = {}", x[0]);
    }
}
