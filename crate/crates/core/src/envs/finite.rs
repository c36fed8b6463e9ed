//! Small explicitly tabulated MDPs, mostly used to check learners against
//! exact solutions.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

use super::{Environment, Step, TabularEnvironment};
use crate::error::{Error, Result};
use crate::reward::split_reward;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewardDist {
    Const(f64),
    Normal { mean: f64, sd: f64 },
}

impl RewardDist {
    pub fn mean(&self) -> f64 {
        match *self {
            RewardDist::Const(v) => v,
            RewardDist::Normal { mean, .. } => mean,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RewardDist::Const(v) => v,
            RewardDist::Normal { mean, sd } => Normal::new(mean, sd).expect("validated at construction").sample(rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub prob: f64,
    pub next: usize,
    pub reward: RewardDist,
}

impl Outcome {
    pub fn certain(next: usize, reward: f64) -> Self {
        Outcome {
            prob: 1.0,
            next,
            reward: RewardDist::Const(reward),
        }
    }
}

/// `transitions[s][a]` lists the possible outcomes of taking `a` in `s`.
#[derive(Debug, Clone)]
pub struct FiniteMdp {
    transitions: Vec<Vec<Vec<Outcome>>>,
    start: usize,
    current: usize,
}

impl FiniteMdp {
    pub fn new(transitions: Vec<Vec<Vec<Outcome>>>, start: usize) -> Result<Self> {
        let n = transitions.len();
        if start >= n {
            return Err(Error::InvalidInput(format!("start state {start} out of range")));
        }
        for (s, actions) in transitions.iter().enumerate() {
            for (a, outcomes) in actions.iter().enumerate() {
                let total: f64 = outcomes.iter().map(|o| o.prob).sum();
                if outcomes.is_empty() || (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "outcome probabilities of ({s}, {a}) sum to {total}"
                    )));
                }
                for o in outcomes {
                    if o.next >= n || o.prob < 0.0 {
                        return Err(Error::InvalidInput(format!("bad outcome {o:?} at ({s}, {a})")));
                    }
                    if let RewardDist::Normal { sd, .. } = o.reward {
                        if !(sd.is_finite() && sd >= 0.0) {
                            return Err(Error::InvalidInput(format!("bad reward sd {sd}")));
                        }
                    }
                }
            }
        }
        Ok(FiniteMdp {
            transitions,
            start,
            current: start,
        })
    }

    pub fn transitions(&self) -> &[Vec<Vec<Outcome>>] {
        &self.transitions
    }

    pub fn start(&self) -> usize {
        self.start
    }
}

impl Environment for FiniteMdp {
    type State = usize;

    fn reset(&mut self, _rng: &mut dyn RngCore) -> usize {
        self.current = self.start;
        self.start
    }

    fn num_actions(&self, state: &usize) -> usize {
        self.transitions.get(*state).map_or(0, Vec::len)
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<Step<usize>> {
        let state = self.current;
        let outcomes = self
            .transitions
            .get(state)
            .and_then(|a| a.get(action))
            .ok_or(Error::InvalidAction { state, action })?;
        let outcome = if outcomes.len() == 1 {
            &outcomes[0]
        } else {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            outcomes
                .iter()
                .find(|o| {
                    acc += o.prob;
                    u < acc
                })
                .unwrap_or(outcomes.last().expect("non-empty"))
        };
        let reward = split_reward(outcome.reward.sample(rng))?;
        self.current = outcome.next;
        Ok(Step {
            next: outcome.next,
            reward,
            done: self.num_actions(&outcome.next) == 0,
        })
    }

    fn state_id(&self, state: &usize) -> usize {
        *state
    }
}

impl TabularEnvironment for FiniteMdp {
    fn actions_per_state(&self) -> Vec<usize> {
        self.transitions.iter().map(Vec::len).collect()
    }
}
