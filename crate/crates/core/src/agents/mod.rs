//! Learning agents.
//!
//! Every algorithm is one [`AgentKind`]. The split family (SQL and its
//! presets) shares one update rule; the presets differ only in their
//! [`AgentParams`].

mod linear;
mod presets;
mod tabular;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reward::RewardPair;

pub use linear::{LinearAgent, LinearRate};
pub use presets::{preset_params, PresetRange};
pub use tabular::{
    double_q_update, maxpain_update, ql_update, sarsa_update, split_select_values, sql2_update, sql_update,
    TabularAgent,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgentKind {
    #[serde(rename = "QL")]
    Ql,
    #[serde(rename = "DQL")]
    Dql,
    #[serde(rename = "SARSA")]
    Sarsa,
    #[serde(rename = "MP")]
    MaxPain,
    #[serde(rename = "SQL")]
    Sql,
    #[serde(rename = "SQL2")]
    Sql2,
    #[serde(rename = "PQL")]
    Pql,
    #[serde(rename = "NQL")]
    Nql,
    #[serde(rename = "ADD")]
    Addiction,
    #[serde(rename = "ADHD")]
    Adhd,
    #[serde(rename = "AD")]
    Alzheimers,
    #[serde(rename = "CP")]
    ChronicPain,
    #[serde(rename = "bvFTD")]
    Bvftd,
    #[serde(rename = "PD")]
    Parkinsons,
    #[serde(rename = "M")]
    Moderate,
}

/// The value-update family an agent kind belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateRule {
    Q,
    DoubleQ,
    Sarsa,
    MaxPain,
    /// Weights on the instantaneous stream rewards.
    Split,
    /// Weights moved into action selection.
    Split2,
}

impl AgentKind {
    pub const ALL: [AgentKind; 15] = [
        AgentKind::Ql,
        AgentKind::Dql,
        AgentKind::Sarsa,
        AgentKind::MaxPain,
        AgentKind::Sql,
        AgentKind::Sql2,
        AgentKind::Pql,
        AgentKind::Nql,
        AgentKind::Addiction,
        AgentKind::Adhd,
        AgentKind::Alzheimers,
        AgentKind::ChronicPain,
        AgentKind::Bvftd,
        AgentKind::Parkinsons,
        AgentKind::Moderate,
    ];

    /// The eight agents of the standard tournament.
    pub const STANDARD: [AgentKind; 8] = [
        AgentKind::Ql,
        AgentKind::Dql,
        AgentKind::Sarsa,
        AgentKind::Sql,
        AgentKind::Sql2,
        AgentKind::MaxPain,
        AgentKind::Pql,
        AgentKind::Nql,
    ];

    pub const MENTAL: [AgentKind; 7] = [
        AgentKind::Addiction,
        AgentKind::Adhd,
        AgentKind::Alzheimers,
        AgentKind::ChronicPain,
        AgentKind::Bvftd,
        AgentKind::Parkinsons,
        AgentKind::Moderate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Ql => "QL",
            AgentKind::Dql => "DQL",
            AgentKind::Sarsa => "SARSA",
            AgentKind::MaxPain => "MP",
            AgentKind::Sql => "SQL",
            AgentKind::Sql2 => "SQL2",
            AgentKind::Pql => "PQL",
            AgentKind::Nql => "NQL",
            AgentKind::Addiction => "ADD",
            AgentKind::Adhd => "ADHD",
            AgentKind::Alzheimers => "AD",
            AgentKind::ChronicPain => "CP",
            AgentKind::Bvftd => "bvFTD",
            AgentKind::Parkinsons => "PD",
            AgentKind::Moderate => "M",
        }
    }

    pub fn rule(self) -> UpdateRule {
        match self {
            AgentKind::Ql => UpdateRule::Q,
            AgentKind::Dql => UpdateRule::DoubleQ,
            AgentKind::Sarsa => UpdateRule::Sarsa,
            AgentKind::MaxPain => UpdateRule::MaxPain,
            AgentKind::Sql2 => UpdateRule::Split2,
            _ => UpdateRule::Split,
        }
    }

    pub fn is_split(self) -> bool {
        matches!(self.rule(), UpdateRule::Split | UpdateRule::Split2)
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AgentKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownAgent(s.to_string()))
    }
}

/// Anything that can be driven through a select -> step -> update loop.
pub trait Learner<S> {
    fn kind(&self) -> AgentKind;

    /// Chooses an action among `0..num_actions` in `state`.
    fn act(&mut self, state: &S, num_actions: usize) -> Result<usize>;

    /// Learns from one transition. `next` is `None` when the transition ended
    /// the episode, otherwise the next state and its action count.
    fn learn(&mut self, state: &S, action: usize, reward: RewardPair, next: Option<(&S, usize)>) -> Result<()>;
}
