//! Linear value functions `Q(s, a) = θ · ψ(s, a)`.

use crate::error::{Error, Result};
use crate::params::AgentParams;
use crate::reward::RewardPair;

/// Maps a (state, action) pair to a fixed-length feature vector.
pub trait FeatureExtractor<S> {
    fn dim(&self) -> usize;
    fn features(&self, state: &S, action: usize) -> Vec<f64>;
}

/// How a linear update consumes the reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearMode {
    /// One weight vector (stored in `theta_pos`) trained on the combined reward.
    Combined,
    /// Per-stream weights with stream memory `lambda_*` and reward weight `w_*`.
    Split {
        lambda_pos: f64,
        w_pos: f64,
        lambda_neg: f64,
        w_neg: f64,
    },
}

impl LinearMode {
    pub fn split_from(params: &AgentParams) -> Self {
        LinearMode::Split {
            lambda_pos: params.lambda_pos,
            w_pos: params.w_pos,
            lambda_neg: params.lambda_neg,
            w_neg: params.w_neg,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearQFunction {
    pub theta_pos: Vec<f64>,
    pub theta_neg: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LinearQFunction {
    pub fn new(feature_dim: usize) -> Self {
        LinearQFunction {
            theta_pos: vec![0.0; feature_dim],
            theta_neg: vec![0.0; feature_dim],
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.theta_pos.len()
    }

    fn check(&self, psi: &[f64]) -> Result<()> {
        if psi.len() != self.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim(),
                found: psi.len(),
            });
        }
        Ok(())
    }

    pub fn positive(&self, psi: &[f64]) -> f64 {
        dot(&self.theta_pos, psi)
    }

    pub fn negative(&self, psi: &[f64]) -> f64 {
        dot(&self.theta_neg, psi)
    }

    pub fn value(&self, psi: &[f64]) -> f64 {
        self.positive(psi) + self.negative(psi)
    }

    /// One TD step on `psi`, bootstrapping from the best of `next_psis`
    /// (empty for terminal transitions).
    ///
    /// In split mode each stream moves by `alpha * difference` along `psi`
    /// and additionally sheds `(1 - lambda)` of its current prediction, which
    /// is exactly the tabular rule under one-hot features.
    pub fn update(
        &mut self,
        psi: &[f64],
        next_psis: &[Vec<f64>],
        reward: RewardPair,
        alpha: f64,
        gamma: f64,
        mode: LinearMode,
    ) -> Result<()> {
        self.check(psi)?;
        for next in next_psis {
            self.check(next)?;
        }
        let best = |f: &dyn Fn(&[f64]) -> f64| -> f64 {
            if next_psis.is_empty() {
                0.0
            } else {
                next_psis.iter().map(|p| f(p)).fold(f64::NEG_INFINITY, f64::max)
            }
        };
        let boot = match mode {
            LinearMode::Combined => (best(&|p| self.value(p)), 0.0),
            LinearMode::Split { .. } => (best(&|p| self.positive(p)), best(&|p| self.negative(p))),
        };
        self.update_with_bootstrap(psi, reward, boot, alpha, gamma, mode)
    }

    /// TD step with externally supplied bootstrap values `(pos, neg)`; in
    /// combined mode only the first is read. Used for on-policy and double
    /// estimator targets.
    pub fn update_with_bootstrap(
        &mut self,
        psi: &[f64],
        reward: RewardPair,
        (boot_pos, boot_neg): (f64, f64),
        alpha: f64,
        gamma: f64,
        mode: LinearMode,
    ) -> Result<()> {
        self.check(psi)?;
        match mode {
            LinearMode::Combined => {
                let q = self.value(psi);
                let difference = reward.combined() + gamma * boot_pos - q;
                axpy(&mut self.theta_pos, alpha * difference, psi);
            }
            LinearMode::Split {
                lambda_pos,
                w_pos,
                lambda_neg,
                w_neg,
            } => {
                let q_pos = self.positive(psi);
                let q_neg = self.negative(psi);
                let diff_pos = w_pos * reward.pos + gamma * boot_pos - q_pos;
                let diff_neg = w_neg * reward.neg + gamma * boot_neg - q_neg;
                let step_pos = (lambda_pos - 1.0) * q_pos + alpha * diff_pos;
                let step_neg = (lambda_neg - 1.0) * q_neg + alpha * diff_neg;
                axpy(&mut self.theta_pos, step_pos, psi);
                axpy(&mut self.theta_neg, step_neg, psi);
            }
        }
        Ok(())
    }
}

fn axpy(theta: &mut [f64], scale: f64, psi: &[f64]) {
    if scale == 0.0 {
        return;
    }
    for (t, p) in theta.iter_mut().zip(psi) {
        *t += scale * p;
    }
}
