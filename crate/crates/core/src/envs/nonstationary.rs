//! Batch-level stochastic reward processes layered over any environment.
//!
//! At the start of every batch of episodes two independent events are
//! resampled: `A` acts on the positive stream, `B` on the negative stream.
//! While an event is active every emitted reward is transformed.

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Environment, Step};
use crate::error::{Error, Result};
use crate::reward::RewardPair;

pub const SCALE_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonstationarityMode {
    Stationary,
    Muting,
    Scaling,
    Flipping,
}

impl NonstationarityMode {
    pub const ALL: [NonstationarityMode; 4] = [
        NonstationarityMode::Stationary,
        NonstationarityMode::Muting,
        NonstationarityMode::Scaling,
        NonstationarityMode::Flipping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NonstationarityMode::Stationary => "stationary",
            NonstationarityMode::Muting => "muting",
            NonstationarityMode::Scaling => "scaling",
            NonstationarityMode::Flipping => "flipping",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonstationarityConfig {
    pub mode: NonstationarityMode,
    /// Episodes per batch.
    pub batch_size: usize,
    pub p_pos_event: f64,
    pub p_neg_event: f64,
}

impl NonstationarityConfig {
    pub fn new(mode: NonstationarityMode, batch_size: usize) -> Self {
        NonstationarityConfig {
            mode,
            batch_size,
            p_pos_event: 0.5,
            p_neg_event: 0.5,
        }
    }
}

/// Which stream events are active in the current batch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ActiveEvents {
    pub pos: bool,
    pub neg: bool,
}

/// Applies the mode's transforms for the active events. Flipped rewards
/// change sign and therefore move to the opposite stream.
pub fn transform(mode: NonstationarityMode, events: ActiveEvents, r: RewardPair) -> RewardPair {
    let ActiveEvents { pos: a, neg: b } = events;
    match mode {
        NonstationarityMode::Stationary => r,
        NonstationarityMode::Muting => RewardPair {
            pos: if a { 0.0 } else { r.pos },
            neg: if b { 0.0 } else { r.neg },
        },
        NonstationarityMode::Scaling => RewardPair {
            pos: if a { r.pos * SCALE_FACTOR } else { r.pos },
            neg: if b { r.neg * SCALE_FACTOR } else { r.neg },
        },
        NonstationarityMode::Flipping => {
            let (kept_pos, moved_to_neg) = if a { (0.0, -r.pos) } else { (r.pos, 0.0) };
            let (kept_neg, moved_to_pos) = if b { (0.0, -r.neg) } else { (r.neg, 0.0) };
            RewardPair {
                pos: kept_pos + moved_to_pos,
                neg: kept_neg + moved_to_neg,
            }
        }
    }
}

/// Wraps an environment with a batch-resampled reward process. Events come
/// from their own stream, so two agents wrapped with the same seed face the
/// same event sequence.
#[derive(Debug, Clone)]
pub struct Nonstationary<E> {
    inner: E,
    config: NonstationarityConfig,
    events_rng: ChaCha8Rng,
    episodes: u64,
    active: ActiveEvents,
}

impl<E: Environment> Nonstationary<E> {
    pub fn new(inner: E, config: NonstationarityConfig, events_rng: ChaCha8Rng) -> Result<Self> {
        if config.batch_size == 0 {
            return Err(Error::precondition("batch size must be >= 1"));
        }
        for p in [config.p_pos_event, config.p_neg_event] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!("event probability {p} outside [0, 1]")));
            }
        }
        Ok(Nonstationary {
            inner,
            config,
            events_rng,
            episodes: 0,
            active: ActiveEvents::default(),
        })
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn active(&self) -> ActiveEvents {
        self.active
    }

    /// Resamples both events independently.
    pub fn on_batch_start(&mut self) -> ActiveEvents {
        if self.config.mode != NonstationarityMode::Stationary {
            self.active = ActiveEvents {
                pos: self.events_rng.random_bool(self.config.p_pos_event),
                neg: self.events_rng.random_bool(self.config.p_neg_event),
            };
        }
        self.active
    }
}

impl<E: Environment> Environment for Nonstationary<E> {
    type State = E::State;

    fn reset(&mut self, rng: &mut dyn RngCore) -> E::State {
        if self.episodes.is_multiple_of(self.config.batch_size as u64) {
            self.on_batch_start();
        }
        self.episodes += 1;
        self.inner.reset(rng)
    }

    fn num_actions(&self, state: &E::State) -> usize {
        self.inner.num_actions(state)
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<Step<E::State>> {
        let mut step = self.inner.step(action, rng)?;
        step.reward = transform(self.config.mode, self.active, step.reward);
        Ok(step)
    }

    fn state_id(&self, state: &E::State) -> usize {
        self.inner.state_id(state)
    }
}
