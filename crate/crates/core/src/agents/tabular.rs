use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{AgentKind, Learner, UpdateRule};
use crate::error::{Error, Result};
use crate::params::AgentParams;
use crate::reward::RewardPair;
use crate::schedule::{argmax_random, epsilon_greedy, max_or_zero, polynomial_learning_rate};
use crate::tables::QTables;

/// `lambda * q + alpha * (reward + gamma * boot - q)`; with `lambda = 1` this
/// is the ordinary TD step, bit for bit.
#[inline]
fn td(q: f64, lambda: f64, alpha: f64, reward: f64, gamma: f64, boot: f64) -> f64 {
    lambda * q + alpha * (reward + gamma * boot - q)
}

/// Standard Q-learning on the combined table. `next = None` marks a terminal
/// transition. Visit counts are left to the caller.
pub fn ql_update(
    t: &mut QTables,
    s: usize,
    a: usize,
    r: f64,
    next: Option<usize>,
    alpha: f64,
    gamma: f64,
) -> Result<()> {
    let i = t.index(s, a)?;
    let boot = next.map_or(0.0, |n| max_or_zero(t.combined_row(n)));
    t.combined[i] = td(t.combined[i], 1.0, alpha, r, gamma, boot);
    Ok(())
}

/// On-policy TD: bootstraps from the action actually taken next.
pub fn sarsa_update(
    t: &mut QTables,
    s: usize,
    a: usize,
    r: f64,
    next: Option<(usize, usize)>,
    alpha: f64,
    gamma: f64,
) -> Result<()> {
    let i = t.index(s, a)?;
    let boot = match next {
        Some((ns, na)) => t.combined[t.index(ns, na)?],
        None => 0.0,
    };
    t.combined[i] = td(t.combined[i], 1.0, alpha, r, gamma, boot);
    Ok(())
}

/// Double estimator step: `update` picks the greedy next action, `eval`
/// scores it.
#[allow(clippy::too_many_arguments)]
pub fn double_q_update<R: Rng + ?Sized>(
    update: &mut QTables,
    eval: &QTables,
    s: usize,
    a: usize,
    r: f64,
    next: Option<usize>,
    alpha: f64,
    gamma: f64,
    rng: &mut R,
) -> Result<()> {
    let i = update.index(s, a)?;
    let boot = match next {
        Some(ns) if update.num_actions(ns) > 0 => {
            let best = argmax_random(update.combined_row(ns), rng)?;
            eval.combined[eval.index(ns, best)?]
        }
        _ => 0.0,
    };
    update.combined[i] = td(update.combined[i], 1.0, alpha, r, gamma, boot);
    Ok(())
}

/// Split update with reward weights (the first split variant):
/// `Q± := λ± Q± + α (w± r± + γ max Q±(s') − Q±)`.
pub fn sql_update(
    t: &mut QTables,
    params: &AgentParams,
    s: usize,
    a: usize,
    reward: RewardPair,
    next: Option<usize>,
    alpha: f64,
) -> Result<()> {
    split_step(
        t,
        s,
        a,
        next,
        alpha,
        params.gamma,
        (params.lambda_pos, params.w_pos * reward.pos),
        (params.lambda_neg, params.w_neg * reward.neg),
    )
}

/// Split update of the second variant: no reward weights, the weights act at
/// selection time instead.
pub fn sql2_update(
    t: &mut QTables,
    params: &AgentParams,
    s: usize,
    a: usize,
    reward: RewardPair,
    next: Option<usize>,
    alpha: f64,
) -> Result<()> {
    split_step(
        t,
        s,
        a,
        next,
        alpha,
        params.gamma,
        (params.lambda_pos, reward.pos),
        (params.lambda_neg, reward.neg),
    )
}

/// Reward stream learns `r⁺`, pain stream learns `|r⁻|`, both bootstrapping
/// from their own maximum.
pub fn maxpain_update(
    t: &mut QTables,
    s: usize,
    a: usize,
    reward: RewardPair,
    next: Option<usize>,
    alpha: f64,
    gamma: f64,
) -> Result<()> {
    split_step(t, s, a, next, alpha, gamma, (1.0, reward.pos), (1.0, -reward.neg))
}

#[allow(clippy::too_many_arguments)]
fn split_step(
    t: &mut QTables,
    s: usize,
    a: usize,
    next: Option<usize>,
    alpha: f64,
    gamma: f64,
    (lambda_pos, r_pos): (f64, f64),
    (lambda_neg, r_neg): (f64, f64),
) -> Result<()> {
    let i = t.index(s, a)?;
    let boot_pos = next.map_or(0.0, |n| max_or_zero(t.positive_row(n)));
    let boot_neg = next.map_or(0.0, |n| max_or_zero(t.negative_row(n)));
    t.positive[i] = td(t.positive[i], lambda_pos, alpha, r_pos, gamma, boot_pos);
    t.negative[i] = td(t.negative[i], lambda_neg, alpha, r_neg, gamma, boot_neg);
    Ok(())
}

/// Selection values of a split-family table in `state`.
pub fn split_select_values(t: &QTables, state: usize, rule: UpdateRule, params: &AgentParams) -> Vec<f64> {
    let pos = t.positive_row(state);
    let neg = t.negative_row(state);
    match rule {
        UpdateRule::Split2 => pos
            .iter()
            .zip(neg)
            .map(|(p, n)| params.w_pos * p + params.w_neg * n)
            .collect(),
        UpdateRule::MaxPain => {
            let w = params.pain_mixing;
            pos.iter().zip(neg).map(|(p, n)| w * p - (1.0 - w) * n).collect()
        }
        _ => pos.iter().zip(neg).map(|(p, n)| p + n).collect(),
    }
}

/// A tabular agent of any kind.
#[derive(Debug, Clone)]
pub struct TabularAgent {
    kind: AgentKind,
    params: AgentParams,
    tables: QTables,
    /// Second estimator for double Q-learning.
    twin: Option<QTables>,
    rng: ChaCha8Rng,
    pending: Option<(usize, usize)>,
}

impl TabularAgent {
    pub fn new(kind: AgentKind, params: AgentParams, actions_per_state: &[usize], rng: ChaCha8Rng) -> Result<Self> {
        params.validate()?;
        let tables = QTables::new(actions_per_state);
        let twin = (kind.rule() == UpdateRule::DoubleQ).then(|| tables.clone());
        Ok(TabularAgent {
            kind,
            params,
            tables,
            twin,
            rng,
            pending: None,
        })
    }

    pub fn params(&self) -> &AgentParams {
        &self.params
    }

    pub fn tables(&self) -> &QTables {
        &self.tables
    }

    pub fn twin(&self) -> Option<&QTables> {
        self.twin.as_ref()
    }

    /// Values the policy maximizes in `state`.
    pub fn action_values(&self, state: usize) -> Vec<f64> {
        match self.kind.rule() {
            UpdateRule::Q | UpdateRule::Sarsa => self.tables.combined_row(state).to_vec(),
            UpdateRule::DoubleQ => {
                let twin = self.twin.as_ref().expect("double Q keeps two tables");
                self.tables
                    .combined_row(state)
                    .iter()
                    .zip(twin.combined_row(state))
                    .map(|(a, b)| a + b)
                    .collect()
            }
            rule => split_select_values(&self.tables, state, rule, &self.params),
        }
    }

    /// Epsilon-greedy over [`Self::action_values`].
    pub fn select(&mut self, state: usize) -> Result<usize> {
        if state >= self.tables.num_states() {
            return Err(Error::precondition(format!("unknown state {state}")));
        }
        let values = self.action_values(state);
        epsilon_greedy(&values, self.params.epsilon, &mut self.rng)
    }

    fn alpha(&mut self, s: usize, a: usize, second: bool) -> Result<f64> {
        let table = if second {
            self.twin.as_mut().expect("double Q keeps two tables")
        } else {
            &mut self.tables
        };
        polynomial_learning_rate(table.visit(s, a)?, self.params.lr_exponent)
    }

    /// One learning step; `next = None` for terminal transitions.
    pub fn update(&mut self, s: usize, a: usize, reward: RewardPair, next: Option<usize>) -> Result<()> {
        let gamma = self.params.gamma;
        match self.kind.rule() {
            UpdateRule::Q => {
                let alpha = self.alpha(s, a, false)?;
                ql_update(&mut self.tables, s, a, reward.combined(), next, alpha, gamma)
            }
            UpdateRule::Sarsa => {
                let next_pair = match next {
                    Some(ns) if self.tables.num_actions(ns) > 0 => {
                        let na = self.select(ns)?;
                        self.pending = Some((ns, na));
                        Some((ns, na))
                    }
                    _ => {
                        self.pending = None;
                        None
                    }
                };
                let alpha = self.alpha(s, a, false)?;
                sarsa_update(&mut self.tables, s, a, reward.combined(), next_pair, alpha, gamma)
            }
            UpdateRule::DoubleQ => {
                let second = self.rng.random_bool(0.5);
                let alpha = self.alpha(s, a, second)?;
                let twin = self.twin.as_mut().expect("double Q keeps two tables");
                let (upd, eval) = if second {
                    (twin, &self.tables)
                } else {
                    (&mut self.tables, &*twin)
                };
                double_q_update(upd, eval, s, a, reward.combined(), next, alpha, gamma, &mut self.rng)
            }
            UpdateRule::MaxPain => {
                let alpha = self.alpha(s, a, false)?;
                maxpain_update(&mut self.tables, s, a, reward, next, alpha, gamma)
            }
            UpdateRule::Split => {
                let alpha = self.alpha(s, a, false)?;
                sql_update(&mut self.tables, &self.params, s, a, reward, next, alpha)
            }
            UpdateRule::Split2 => {
                let alpha = self.alpha(s, a, false)?;
                sql2_update(&mut self.tables, &self.params, s, a, reward, next, alpha)
            }
        }
    }
}

impl Learner<usize> for TabularAgent {
    fn kind(&self) -> AgentKind {
        self.kind
    }

    fn act(&mut self, state: &usize, num_actions: usize) -> Result<usize> {
        if num_actions != self.tables.num_actions(*state) {
            return Err(Error::DimensionMismatch {
                expected: self.tables.num_actions(*state),
                found: num_actions,
            });
        }
        match self.pending.take() {
            Some((s, a)) if s == *state => Ok(a),
            _ => self.select(*state),
        }
    }

    fn learn(&mut self, state: &usize, action: usize, reward: RewardPair, next: Option<(&usize, usize)>) -> Result<()> {
        self.update(*state, action, reward, next.map(|(s, _)| *s))
    }
}
