use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GAMMA: f64 = 0.95;
pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_LR_EXPONENT: f64 = 0.8;
pub const DEFAULT_PAIN_MIXING: f64 = 0.5;

/// Stream biases plus the learning and exploration settings of one agent.
///
/// `lambda_*` scales the stored estimate of a stream before each update,
/// `w_*` scales the stream's instantaneous reward (or, for the second split
/// variant, the stream's value at selection time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentParams {
    pub lambda_pos: f64,
    pub lambda_neg: f64,
    pub w_pos: f64,
    pub w_neg: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub lr_exponent: f64,
    /// Weight on the reward stream in MaxPain's selection rule.
    pub pain_mixing: f64,
}

impl Default for AgentParams {
    fn default() -> Self {
        AgentParams {
            lambda_pos: 1.0,
            lambda_neg: 1.0,
            w_pos: 1.0,
            w_neg: 1.0,
            gamma: DEFAULT_GAMMA,
            epsilon: DEFAULT_EPSILON,
            lr_exponent: DEFAULT_LR_EXPONENT,
            pain_mixing: DEFAULT_PAIN_MIXING,
        }
    }
}

impl AgentParams {
    pub fn with_biases(lambda_pos: f64, w_pos: f64, lambda_neg: f64, w_neg: f64) -> Self {
        AgentParams {
            lambda_pos,
            lambda_neg,
            w_pos,
            w_neg,
            ..AgentParams::default()
        }
    }

    /// Returns every violated constraint, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("lambda_pos", self.lambda_pos),
            ("lambda_neg", self.lambda_neg),
            ("w_pos", self.w_pos),
            ("w_neg", self.w_neg),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                out.push(format!("{name} must be a finite value >= 0, got {v}"));
            }
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("epsilon", self.epsilon),
            ("pain_mixing", self.pain_mixing),
        ] {
            if !(0.0..=1.0).contains(&v) {
                out.push(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !(self.lr_exponent.is_finite() && self.lr_exponent > 0.0) {
            out.push(format!("lr_exponent must be > 0, got {}", self.lr_exponent));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(v.join("; ")))
        }
    }
}
