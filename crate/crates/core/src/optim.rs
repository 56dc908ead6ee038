//! Adaptive-moment gradient descent over flat parameter slices.

use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates for one parameter buffer.
#[derive(Clone, Debug)]
pub struct Adam<F> {
    pub config: AdamConfig,
    m: Vec<F>,
    v: Vec<F>,
    step: i32,
}

impl<F: Float> Adam<F> {
    pub fn new(config: AdamConfig, len: usize) -> Self {
        Adam {
            config,
            m: vec![F::zero(); len],
            v: vec![F::zero(); len],
            step: 0,
        }
    }

    pub fn steps_taken(&self) -> i32 {
        self.step
    }

    /// One bias-corrected update of `params` against `grads`.
    pub fn step(&mut self, params: &mut [F], grads: &[F]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.step += 1;
        let c = &self.config;
        let cast = |x: f64| F::from(x).unwrap();
        let (b1, b2) = (cast(c.beta1), cast(c.beta2));
        let one = F::one();
        let bc1 = one - b1.powi(self.step);
        let bc2 = one - b2.powi(self.step);
        let lr = cast(c.learning_rate);
        let eps = cast(c.epsilon);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = b1 * self.m[i] + (one - b1) * g;
            self.v[i] = b2 * self.v[i] + (one - b2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] = params[i] - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}
