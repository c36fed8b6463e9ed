//! Rollouts, pairwise comparison and aggregate statistics.

mod aggregate;
mod arena;
mod curve;
mod rollout;

pub use aggregate::{aggregate, avg_rankings, pairwise_counts, TournamentResult};
pub use arena::{
    env_stream, pairwise_compare, score_table, AgentSpec, Arena, CompareUnit, IgtArena, MdpArena, PacmanArena,
    ParamOverrides, RunResult, ScoreTable, DEFAULT_TRAVERSALS,
};
pub use curve::{learning_curve, CurvePoint};
pub use rollout::{run_rollout, Horizon, Record, StepRecord, Trajectory};
