#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use splitq::envs::{Environment, FiniteMdp, Outcome};
use splitq::{AgentKind, AgentParams, Learner, TabularAgent};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Expected-reward value iteration: `reward(r)` maps an outcome's mean
/// reward to the quantity being valued, `combine` folds next-state values
/// into the bootstrap (e.g. max or a policy average).
pub fn value_iteration(
    transitions: &[Vec<Vec<Outcome>>],
    gamma: f64,
    reward: impl Fn(f64) -> f64,
    combine: impl Fn(&[f64]) -> f64,
) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = transitions.iter().map(|a| vec![0.0; a.len()]).collect();
    for _ in 0..10_000 {
        let v: Vec<f64> = q
            .iter()
            .map(|row| if row.is_empty() { 0.0 } else { combine(row) })
            .collect();
        let mut delta: f64 = 0.0;
        for (s, actions) in transitions.iter().enumerate() {
            for (a, outcomes) in actions.iter().enumerate() {
                let new: f64 = outcomes
                    .iter()
                    .map(|o| o.prob * (reward(o.reward.mean()) + gamma * v[o.next]))
                    .sum();
                delta = delta.max((new - q[s][a]).abs());
                q[s][a] = new;
            }
        }
        if delta < 1e-14 {
            break;
        }
    }
    q
}

pub fn max(row: &[f64]) -> f64 {
    row.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Deterministic chain `0 - 1 - ... - (n-2)` with terminal `n-1`. Right
/// moves toward the goal (reward 1 on arrival), left moves back at a cost.
pub fn chain(n: usize) -> Vec<Vec<Vec<Outcome>>> {
    let mut t = Vec::new();
    for s in 0..n - 1 {
        let left = Outcome::certain(s.saturating_sub(1), -0.1);
        let right = Outcome::certain(s + 1, if s + 2 == n { 1.0 } else { 0.0 });
        t.push(vec![vec![left], vec![right]]);
    }
    t.push(Vec::new());
    t
}

pub fn agent(kind: AgentKind, params: AgentParams, env: &FiniteMdp, seed: u64) -> TabularAgent {
    let aps: Vec<usize> = (0..env.transitions().len()).map(|s| env.num_actions(&s)).collect();
    TabularAgent::new(kind, params, &aps, rng(seed)).unwrap()
}

/// Plays `steps` actions, restarting finished episodes.
pub fn train<L: Learner<usize>>(agent: &mut L, env: &mut FiniteMdp, steps: usize, seed: u64) {
    let mut env_rng = rng(seed);
    let mut s = env.reset(&mut env_rng);
    for _ in 0..steps {
        let n = env.num_actions(&s);
        let a = agent.act(&s, n).unwrap();
        let step = env.step(a, &mut env_rng).unwrap();
        let next_n = env.num_actions(&step.next);
        let next = (!step.done).then_some((&step.next, next_n));
        agent.learn(&s, a, step.reward, next).unwrap();
        s = if step.done { env.reset(&mut env_rng) } else { step.next };
    }
}
