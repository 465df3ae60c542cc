use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::MlpParams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdamConfig {
    pub lr: f64,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_eps() -> f64 {
    1e-8
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig {
            lr,
            beta1: default_beta1(),
            beta2: default_beta2(),
            eps: default_eps(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lr >= 0.0
            && self.lr.is_finite()
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid optimizer settings {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Descent,
    Ascent,
}

/// Bias-corrected adaptive-moment optimizer state for one network.
#[derive(Clone, Debug)]
pub struct AdamState {
    first_moment: MlpParams,
    second_moment: MlpParams,
    step_count: u64,
    config: AdamConfig,
}

impl AdamState {
    pub fn new(params: &MlpParams, config: AdamConfig) -> Self {
        AdamState {
            first_moment: params.zeros_like(),
            second_moment: params.zeros_like(),
            step_count: 0,
            config,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    pub fn first_moment(&self) -> &MlpParams {
        &self.first_moment
    }

    pub fn second_moment(&self) -> &MlpParams {
        &self.second_moment
    }

    pub fn step(&mut self, params: &mut MlpParams, grads: &MlpParams, direction: Direction) -> Result<()> {
        if !params.same_shape(grads) || !params.same_shape(&self.first_moment) {
            return Err(Error::invalid("optimizer shape mismatch"));
        }
        self.step_count += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        } = self.config;
        let t = self.step_count as i32;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        let sign = match direction {
            Direction::Descent => -1.0,
            Direction::Ascent => 1.0,
        };
        let blocks = params
            .blocks_mut()
            .zip(grads.blocks())
            .zip(self.first_moment.blocks_mut().zip(self.second_moment.blocks_mut()));
        for ((p, g), (m, v)) in blocks {
            for i in 0..p.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                p[i] += sign * lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;

    fn scalar(v: f64) -> MlpParams {
        MlpParams::from_parts(vec![1, 1], vec![vec![v]], vec![vec![0.0]], Activation::Identity)
            .unwrap()
    }

    #[test]
    fn zero_grads_change_nothing() {
        let mut p = scalar(0.3);
        let before = p.clone();
        let mut st = AdamState::new(&p, AdamConfig::with_lr(0.1));
        let g = p.zeros_like();
        for _ in 0..5 {
            st.step(&mut p, &g, Direction::Descent).unwrap();
        }
        assert_eq!(p, before);
        assert_eq!(st.step_count(), 5);
        assert!(st.first_moment().blocks().all(|b| b.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn zero_lr_changes_nothing() {
        let mut p = scalar(0.3);
        let before = p.clone();
        let mut st = AdamState::new(&p, AdamConfig::with_lr(0.0));
        let mut g = p.zeros_like();
        g.weights_mut()[0][0] = 2.5;
        st.step(&mut p, &g, Direction::Ascent).unwrap();
        assert_eq!(p, before);
    }

    #[test]
    fn first_step_magnitude() {
        // m̂ = 1, v̂ = 1 ⇒ Δ = lr / (1 + eps).
        let mut p = scalar(1.0);
        let mut st = AdamState::new(&p, AdamConfig::with_lr(0.1));
        let mut g = p.zeros_like();
        g.weights_mut()[0][0] = 1.0;
        st.step(&mut p, &g, Direction::Descent).unwrap();
        let expected = 1.0 - 0.1 / (1.0 + 1e-8);
        assert!((p.weights()[0][0] - expected).abs() < 1e-15);

        let mut q = scalar(1.0);
        let mut st = AdamState::new(&q, AdamConfig::with_lr(0.1));
        st.step(&mut q, &g, Direction::Ascent).unwrap();
        assert!((q.weights()[0][0] - (2.0 - expected)).abs() < 1e-15);
    }
}
