//! Two-stream reinforcement learning workbench.
//!
//! Split Q-learning keeps separate value estimates for gains and losses and
//! combines them only when an action is chosen. This crate provides the
//! agents (tabular and linear), the benchmark environments (bimodal MDP,
//! Iowa Gambling Task, a small PacMan with non-stationary reward processes)
//! and the pairwise tournament used to compare them.

pub mod agents;
pub mod envs;
pub mod error;
pub mod linear;
pub mod params;
pub mod reward;
pub mod schedule;
pub mod seed;
pub mod tables;
pub mod tournament;

pub use agents::{AgentKind, Learner, LinearAgent, TabularAgent};
pub use error::{Error, Result};
pub use params::AgentParams;
pub use reward::{split_reward, RewardPair};
pub use seed::{Role, RunSeed, StreamPath};
pub use tables::QTables;
