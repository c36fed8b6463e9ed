use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{AgentKind, Learner};
use crate::envs::Environment;
use crate::error::{Error, Result};
use crate::reward::RewardPair;

/// Random words reserved for each environment call. The environment stream
/// is repositioned before every call, so the draws behind action `t` do not
/// depend on how many words earlier calls consumed. Two agents sharing an
/// environment stream therefore see the same randomness step for step.
const WORDS_PER_CALL: u128 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Horizon {
    /// A fixed number of actions, restarting episodes as they end.
    Actions(usize),
    /// A fixed number of complete episodes.
    Episodes(usize),
}

/// How much of each rollout to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Record {
    /// Totals and per-episode scores only.
    Summary,
    /// Plus cumulative combined reward after every action.
    Curve,
    /// Plus every step.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub state: usize,
    pub action: usize,
    pub reward: RewardPair,
    /// Combined reward accumulated up to and including this step.
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: AgentKind,
    pub steps: Vec<StepRecord>,
    pub cumulative: Vec<f64>,
    pub episode_scores: Vec<f64>,
    /// Per-stream totals over the whole rollout.
    pub totals: RewardPair,
    /// Running sum of combined rewards; equals the last `cumulative` entry.
    pub combined: f64,
    pub actions: usize,
}

impl Trajectory {
    pub fn total(&self) -> f64 {
        self.combined
    }

    pub fn mean_episode_score(&self) -> f64 {
        if self.episode_scores.is_empty() {
            0.0
        } else {
            self.episode_scores.iter().sum::<f64>() / self.episode_scores.len() as f64
        }
    }
}

fn seek(rng: &mut ChaCha8Rng, call: u128) {
    rng.set_word_pos(call * WORDS_PER_CALL);
}

/// Runs the select -> step -> update loop.
///
/// `env_rng` drives every environment draw; the agent explores with its own
/// stream. Episodes that are still running when an action horizon is reached
/// are cut off and do not contribute an episode score.
pub fn run_rollout<E, L>(
    agent: &mut L,
    env: &mut E,
    horizon: Horizon,
    mut env_rng: ChaCha8Rng,
    record: Record,
) -> Result<Trajectory>
where
    E: Environment,
    L: Learner<E::State>,
{
    let (max_actions, max_episodes) = match horizon {
        Horizon::Actions(0) | Horizon::Episodes(0) => return Err(Error::precondition("horizon must be at least 1")),
        Horizon::Actions(n) => (n, usize::MAX),
        Horizon::Episodes(n) => (usize::MAX, n),
    };
    let mut traj = Trajectory {
        kind: agent.kind(),
        steps: Vec::new(),
        cumulative: Vec::new(),
        episode_scores: Vec::new(),
        totals: RewardPair::ZERO,
        combined: 0.0,
        actions: 0,
    };
    let mut t: u128 = 0;
    let mut episode_score = 0.0;
    seek(&mut env_rng, 2 * t + 1);
    let mut state = env.reset(&mut env_rng);
    while traj.actions < max_actions && traj.episode_scores.len() < max_episodes {
        let n = env.num_actions(&state);
        if n == 0 {
            return Err(Error::precondition("environment reset into a terminal state"));
        }
        let action = agent.act(&state, n)?;
        seek(&mut env_rng, 2 * t);
        let step = env.step(action, &mut env_rng)?;
        let next_n = env.num_actions(&step.next);
        let next = (!step.done && next_n > 0).then_some((&step.next, next_n));
        agent.learn(&state, action, step.reward, next)?;

        traj.actions += 1;
        t += 1;
        traj.totals += step.reward;
        traj.combined += step.reward.combined();
        episode_score += step.reward.combined();
        let cumulative = traj.combined;
        if record >= Record::Curve {
            traj.cumulative.push(cumulative);
        }
        if record == Record::Full {
            traj.steps.push(StepRecord {
                state: env.state_id(&state),
                action,
                reward: step.reward,
                cumulative,
            });
        }

        if step.done || next_n == 0 {
            traj.episode_scores.push(episode_score);
            episode_score = 0.0;
            seek(&mut env_rng, 2 * t + 1);
            state = env.reset(&mut env_rng);
        } else {
            state = step.next;
        }
    }
    Ok(traj)
}
