use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reward observation split into a gain stream and a loss stream.
///
/// `pos` is always non-negative and `neg` always non-positive. Agents that do
/// not split their value estimates consume [`RewardPair::combined`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardPair {
    pub pos: f64,
    pub neg: f64,
}

impl RewardPair {
    pub const ZERO: RewardPair = RewardPair { pos: 0.0, neg: 0.0 };

    /// Builds a pair, rejecting values on the wrong side of zero.
    pub fn new(pos: f64, neg: f64) -> Result<Self> {
        if !(pos.is_finite() && neg.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "reward streams must be finite, got ({pos}, {neg})"
            )));
        }
        if pos < 0.0 || neg > 0.0 {
            return Err(Error::InvalidInput(format!(
                "expected pos >= 0 >= neg, got ({pos}, {neg})"
            )));
        }
        Ok(RewardPair { pos, neg })
    }

    pub fn combined(&self) -> f64 {
        self.pos + self.neg
    }

    pub fn is_valid(&self) -> bool {
        self.pos >= 0.0 && self.neg <= 0.0
    }
}

impl Add for RewardPair {
    type Output = RewardPair;

    fn add(self, rhs: RewardPair) -> RewardPair {
        RewardPair {
            pos: self.pos + rhs.pos,
            neg: self.neg + rhs.neg,
        }
    }
}

impl AddAssign for RewardPair {
    fn add_assign(&mut self, rhs: RewardPair) {
        self.pos += rhs.pos;
        self.neg += rhs.neg;
    }
}

/// Routes a scalar reward into the stream matching its sign.
pub fn split_reward(r: f64) -> Result<RewardPair> {
    if !r.is_finite() {
        return Err(Error::InvalidInput(format!("reward must be finite, got {r}")));
    }
    Ok(RewardPair {
        pos: r.max(0.0),
        neg: r.min(0.0),
    })
}
