use std::marker::PhantomData;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AgentKind, Learner, UpdateRule};
use crate::error::{Error, Result};
use crate::linear::{FeatureExtractor, LinearMode, LinearQFunction};
use crate::params::AgentParams;
use crate::reward::RewardPair;
use crate::schedule::{argmax_random, epsilon_greedy, polynomial_learning_rate};

/// Step size for linear agents. Per-(s, a) visit counts do not exist once
/// states are described by features, so the schedule runs on the agent's
/// total update count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearRate {
    Constant(f64),
    Polynomial { exponent: f64 },
}

impl LinearRate {
    fn at(self, updates: u64) -> Result<f64> {
        match self {
            LinearRate::Constant(a) => Ok(a),
            LinearRate::Polynomial { exponent } => polynomial_learning_rate(updates, exponent),
        }
    }
}

/// An agent whose values are linear in the features `ψ(s, a)`.
#[derive(Debug, Clone)]
pub struct LinearAgent<S, F> {
    kind: AgentKind,
    params: AgentParams,
    function: LinearQFunction,
    twin: Option<LinearQFunction>,
    extractor: F,
    rate: LinearRate,
    updates: u64,
    rng: ChaCha8Rng,
    pending: Option<usize>,
    _state: PhantomData<fn(&S)>,
}

impl<S, F: FeatureExtractor<S>> LinearAgent<S, F> {
    pub fn new(kind: AgentKind, params: AgentParams, extractor: F, rate: LinearRate, rng: ChaCha8Rng) -> Result<Self> {
        params.validate()?;
        let function = LinearQFunction::new(extractor.dim());
        let twin = (kind.rule() == UpdateRule::DoubleQ).then(|| function.clone());
        Ok(LinearAgent {
            kind,
            params,
            function,
            twin,
            extractor,
            rate,
            updates: 0,
            rng,
            pending: None,
            _state: PhantomData,
        })
    }

    pub fn function(&self) -> &LinearQFunction {
        &self.function
    }

    pub fn twin(&self) -> Option<&LinearQFunction> {
        self.twin.as_ref()
    }

    pub fn params(&self) -> &AgentParams {
        &self.params
    }

    fn psi(&self, state: &S, action: usize) -> Result<Vec<f64>> {
        let psi = self.extractor.features(state, action);
        if psi.len() != self.function.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.function.feature_dim(),
                found: psi.len(),
            });
        }
        Ok(psi)
    }

    fn value_of(&self, psi: &[f64]) -> f64 {
        let f = &self.function;
        match self.kind.rule() {
            UpdateRule::Q | UpdateRule::Sarsa | UpdateRule::Split => f.value(psi),
            UpdateRule::DoubleQ => f.value(psi) + self.twin.as_ref().map_or(0.0, |t| t.value(psi)),
            UpdateRule::Split2 => self.params.w_pos * f.positive(psi) + self.params.w_neg * f.negative(psi),
            UpdateRule::MaxPain => {
                let w = self.params.pain_mixing;
                w * f.positive(psi) - (1.0 - w) * f.negative(psi)
            }
        }
    }

    pub fn action_values(&self, state: &S, num_actions: usize) -> Result<Vec<f64>> {
        (0..num_actions)
            .map(|a| self.psi(state, a).map(|p| self.value_of(&p)))
            .collect()
    }

    pub fn select(&mut self, state: &S, num_actions: usize) -> Result<usize> {
        let values = self.action_values(state, num_actions)?;
        epsilon_greedy(&values, self.params.epsilon, &mut self.rng)
    }

    /// One linear TD step.
    pub fn update(&mut self, state: &S, action: usize, reward: RewardPair, next: Option<(&S, usize)>) -> Result<()> {
        let psi = self.psi(state, action)?;
        let next_psis: Vec<Vec<f64>> = match next {
            Some((ns, n)) => (0..n).map(|a| self.psi(ns, a)).collect::<Result<_>>()?,
            None => Vec::new(),
        };
        self.updates += 1;
        let alpha = self.rate.at(self.updates)?;
        let gamma = self.params.gamma;
        let p = self.params;
        match self.kind.rule() {
            UpdateRule::Q => self
                .function
                .update(&psi, &next_psis, reward, alpha, gamma, LinearMode::Combined),
            UpdateRule::Sarsa => {
                let boot = match next {
                    Some((ns, n)) if n > 0 => {
                        let na = self.select(ns, n)?;
                        self.pending = Some(na);
                        self.function.value(&next_psis[na])
                    }
                    _ => {
                        self.pending = None;
                        0.0
                    }
                };
                self.function
                    .update_with_bootstrap(&psi, reward, (boot, 0.0), alpha, gamma, LinearMode::Combined)
            }
            UpdateRule::DoubleQ => {
                let second = self.rng.random_bool(0.5);
                let twin = self.twin.as_mut().expect("double Q keeps two functions");
                let (upd, eval) = if second {
                    (twin, &self.function)
                } else {
                    (&mut self.function, &*twin)
                };
                let boot = if next_psis.is_empty() {
                    0.0
                } else {
                    let own: Vec<f64> = next_psis.iter().map(|p| upd.value(p)).collect();
                    let best = argmax_random(&own, &mut self.rng)?;
                    eval.value(&next_psis[best])
                };
                upd.update_with_bootstrap(&psi, reward, (boot, 0.0), alpha, gamma, LinearMode::Combined)
            }
            UpdateRule::MaxPain => {
                // Pain is learned as a positive magnitude: w_neg = -1 flips r⁻.
                let mode = LinearMode::Split {
                    lambda_pos: 1.0,
                    w_pos: 1.0,
                    lambda_neg: 1.0,
                    w_neg: -1.0,
                };
                self.function.update(&psi, &next_psis, reward, alpha, gamma, mode)
            }
            UpdateRule::Split => {
                self.function
                    .update(&psi, &next_psis, reward, alpha, gamma, LinearMode::split_from(&p))
            }
            UpdateRule::Split2 => {
                let mode = LinearMode::Split {
                    lambda_pos: p.lambda_pos,
                    w_pos: 1.0,
                    lambda_neg: p.lambda_neg,
                    w_neg: 1.0,
                };
                self.function.update(&psi, &next_psis, reward, alpha, gamma, mode)
            }
        }
    }
}

impl<S, F: FeatureExtractor<S>> Learner<S> for LinearAgent<S, F> {
    fn kind(&self) -> AgentKind {
        self.kind
    }

    fn act(&mut self, state: &S, num_actions: usize) -> Result<usize> {
        match self.pending.take() {
            Some(a) if a < num_actions => Ok(a),
            _ => self.select(state, num_actions),
        }
    }

    fn learn(&mut self, state: &S, action: usize, reward: RewardPair, next: Option<(&S, usize)>) -> Result<()> {
        self.update(state, action, reward, next)
    }
}
