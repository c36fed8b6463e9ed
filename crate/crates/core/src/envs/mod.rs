//! Benchmark environments. All of them emit [`RewardPair`] observations.

pub mod finite;
pub mod igt;
pub mod mdp;
pub mod nonstationary;
pub mod pacman;

use rand::RngCore;

use crate::error::Result;
use crate::reward::RewardPair;

pub use finite::{FiniteMdp, Outcome, RewardDist};
pub use igt::{Deck, IgtEnv, IgtScheme};
pub use mdp::{generate_scenario, MdpEnv, Mixture, ScenarioSpec};
pub use nonstationary::{NonstationarityConfig, NonstationarityMode, Nonstationary};
pub use pacman::{Layout, PacmanEnv, PacmanFeatures, PacmanState};

#[derive(Debug, Clone, PartialEq)]
pub struct Step<S> {
    pub next: S,
    pub reward: RewardPair,
    pub done: bool,
}

/// A single-owner episodic environment that tracks its current state.
pub trait Environment {
    type State: Clone;

    /// Starts a new episode and returns the initial state.
    fn reset(&mut self, rng: &mut dyn RngCore) -> Self::State;

    fn num_actions(&self, state: &Self::State) -> usize;

    /// Advances the current state by `action`.
    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<Step<Self::State>>;

    /// Compact identifier of a state, used in trajectory records.
    fn state_id(&self, state: &Self::State) -> usize;
}

/// Environments with a small enumerated state space. States without actions
/// are terminal.
pub trait TabularEnvironment: Environment<State = usize> {
    fn actions_per_state(&self) -> Vec<usize>;
}
