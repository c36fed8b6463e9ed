//! The five-state gambling MDP with bimodal reward distributions.
//!
//! ```text
//!        left        (1 action)
//!   A ---------> B ------------> D   reveals n draws of R_D
//!   |  right         (1 action)
//!   +----------> C ------------> E   reveals n draws of R_E
//! ```
//!
//! Moving into B or C pays nothing. D and E are terminal; the next traversal
//! starts again at A.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Environment, Step, TabularEnvironment};
use crate::error::{Error, Result};
use crate::reward::{split_reward, RewardPair};

pub const STATE_A: usize = 0;
pub const STATE_B: usize = 1;
pub const STATE_C: usize = 2;
pub const STATE_D: usize = 3;
pub const STATE_E: usize = 4;
pub const LEFT: usize = 0;
pub const RIGHT: usize = 1;

pub const DEFAULT_DRAWS_PER_VISIT: usize = 50;

/// `p * N(mean1, sd1) + (1 - p) * N(mean2, sd2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mixture {
    pub mean1: i32,
    pub sd1: i32,
    pub mean2: i32,
    pub sd2: i32,
    pub p: f64,
}

impl Mixture {
    pub fn mean(&self) -> f64 {
        self.p * self.mean1 as f64 + (1.0 - self.p) * self.mean2 as f64
    }

    pub fn violations(&self, name: &str) -> Vec<String> {
        let mut out = Vec::new();
        for (field, m) in [("mean1", self.mean1), ("mean2", self.mean2)] {
            if !(-100..=100).contains(&m) {
                out.push(format!("{name}.{field} must lie in [-100, 100], got {m}"));
            }
        }
        for (field, sd) in [("sd1", self.sd1), ("sd2", self.sd2)] {
            if !(0..=20).contains(&sd) {
                out.push(format!("{name}.{field} must lie in [0, 20], got {sd}"));
            }
        }
        if !(0.0..=1.0).contains(&self.p) {
            out.push(format!("{name}.p must lie in [0, 1], got {}", self.p));
        }
        out
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (mean, sd) = if rng.random::<f64>() < self.p {
            (self.mean1, self.sd1)
        } else {
            (self.mean2, self.sd2)
        };
        Normal::new(mean as f64, sd as f64)
            .expect("sd validated non-negative")
            .sample(rng)
    }

    /// Sum of `n` draws, each routed by sign before summing per stream.
    pub fn reveal<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<RewardPair> {
        let mut total = RewardPair::ZERO;
        for _ in 0..n {
            total += split_reward(self.sample(rng))?;
        }
        Ok(total)
    }
}

/// Reward distributions behind D (left branch) and E (right branch).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub left: Mixture,
    pub right: Mixture,
    #[serde(default = "default_draws")]
    pub draws_per_visit: usize,
}

fn default_draws() -> usize {
    DEFAULT_DRAWS_PER_VISIT
}

impl ScenarioSpec {
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.left.violations("left");
        out.extend(self.right.violations("right"));
        if self.draws_per_visit == 0 {
            out.push("draws_per_visit must be >= 1".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(v.join("; ")))
        }
    }
}

fn random_mixture<R: Rng + ?Sized>(rng: &mut R) -> Mixture {
    Mixture {
        mean1: rng.random_range(-100..=100),
        sd1: rng.random_range(0..=20),
        mean2: rng.random_range(-100..=100),
        sd2: rng.random_range(0..=20),
        p: rng.random::<f64>(),
    }
}

/// Draws a random bimodal scenario: integer means in [-100, 100], integer
/// standard deviations in [0, 20], mixing probability uniform in [0, 1).
pub fn generate_scenario<R: Rng + ?Sized>(rng: &mut R) -> ScenarioSpec {
    let left = random_mixture(rng);
    let right = random_mixture(rng);
    ScenarioSpec {
        left,
        right,
        draws_per_visit: DEFAULT_DRAWS_PER_VISIT,
    }
}

#[derive(Debug, Clone)]
pub struct MdpEnv {
    spec: ScenarioSpec,
    current: usize,
}

impl MdpEnv {
    pub fn new(spec: ScenarioSpec) -> Result<Self> {
        spec.validate()?;
        Ok(MdpEnv { spec, current: STATE_A })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    /// Pure transition function.
    pub fn transition<R: Rng + ?Sized>(&self, state: usize, action: usize, rng: &mut R) -> Result<Step<usize>> {
        let invalid = Error::InvalidAction { state, action };
        let (next, reward) = match (state, action) {
            (STATE_A, LEFT) => (STATE_B, RewardPair::ZERO),
            (STATE_A, RIGHT) => (STATE_C, RewardPair::ZERO),
            (STATE_B, 0) => (STATE_D, self.spec.left.reveal(self.spec.draws_per_visit, rng)?),
            (STATE_C, 0) => (STATE_E, self.spec.right.reveal(self.spec.draws_per_visit, rng)?),
            _ => return Err(invalid),
        };
        Ok(Step {
            next,
            reward,
            done: next == STATE_D || next == STATE_E,
        })
    }
}

impl Environment for MdpEnv {
    type State = usize;

    fn reset(&mut self, _rng: &mut dyn RngCore) -> usize {
        self.current = STATE_A;
        STATE_A
    }

    fn num_actions(&self, state: &usize) -> usize {
        match *state {
            STATE_A => 2,
            STATE_B | STATE_C => 1,
            _ => 0,
        }
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<Step<usize>> {
        let step = self.transition(self.current, action, rng)?;
        self.current = step.next;
        Ok(step)
    }

    fn state_id(&self, state: &usize) -> usize {
        *state
    }
}

impl TabularEnvironment for MdpEnv {
    fn actions_per_state(&self) -> Vec<usize> {
        vec![2, 1, 1, 0, 0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn constant(mean: i32) -> Mixture {
        Mixture {
            mean1: mean,
            sd1: 0,
            mean2: mean,
            sd2: 0,
            p: 0.5,
        }
    }

    fn spec(left: Mixture, right: Mixture) -> ScenarioSpec {
        ScenarioSpec {
            left,
            right,
            draws_per_visit: 50,
        }
    }

    #[test]
    fn moving_to_b_or_c_pays_nothing() {
        let env = MdpEnv::new(spec(constant(10), constant(-10))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let left = env.transition(STATE_A, LEFT, &mut rng).unwrap();
        assert_eq!((left.next, left.reward, left.done), (STATE_B, RewardPair::ZERO, false));
        let right = env.transition(STATE_A, RIGHT, &mut rng).unwrap();
        assert_eq!((right.next, right.reward), (STATE_C, RewardPair::ZERO));
    }

    #[test]
    fn deterministic_draws_sum_per_stream() {
        let env = MdpEnv::new(spec(constant(10), constant(-3))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = env.transition(STATE_B, 0, &mut rng).unwrap();
        assert_eq!((d.next, d.done), (STATE_D, true));
        assert_eq!(d.reward, RewardPair { pos: 500.0, neg: 0.0 });
        let e = env.transition(STATE_C, 0, &mut rng).unwrap();
        assert_eq!(e.reward, RewardPair { pos: 0.0, neg: -150.0 });
    }

    #[test]
    fn invalid_actions() {
        let env = MdpEnv::new(spec(constant(1), constant(1))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(env.transition(STATE_A, 2, &mut rng).is_err());
        assert!(env.transition(STATE_B, 1, &mut rng).is_err());
        assert!(env.transition(STATE_D, 0, &mut rng).is_err());
    }

    #[test]
    fn mixture_mean_matches_closed_form() {
        let mixture = Mixture {
            mean1: 10,
            sd1: 5,
            mean2: -5,
            sd2: 1,
            p: 0.3,
        };
        let env = MdpEnv::new(spec(mixture, constant(0))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let visits = 100_000;
        let total: f64 = (0..visits)
            .map(|_| env.transition(STATE_B, 0, &mut rng).unwrap().reward.combined())
            .sum();
        let expected = 50.0 * (0.3 * 10.0 - 0.7 * 5.0);
        assert_eq!(expected, -25.0);
        assert!((total / visits as f64 - expected).abs() < 1.5);
    }

    #[test]
    fn generated_scenarios_in_range_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10_000 {
            let s = generate_scenario(&mut rng);
            assert!(s.violations().is_empty(), "{s:?}");
        }
        let a = generate_scenario(&mut ChaCha8Rng::seed_from_u64(9));
        let b = generate_scenario(&mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn generated_means_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts = [0u64; 201];
        let n = 100_000;
        for _ in 0..n {
            counts[(generate_scenario(&mut rng).left.mean1 + 100) as usize] += 1;
        }
        let expected = n as f64 / 201.0;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p = 1.0 - ChiSquared::new(200.0).unwrap().cdf(stat);
        assert!(p > 0.01, "chi-square p = {p}");
    }
}
