use rand::Rng;

use crate::error::{Error, Result};

/// `1 / visits^exponent`, where `visits` already counts the current update.
pub fn polynomial_learning_rate(visits: u64, exponent: f64) -> Result<f64> {
    if visits == 0 {
        return Err(Error::precondition("learning rate needs at least one visit"));
    }
    Ok((visits as f64).powf(-exponent))
}

/// Index of a maximal value, ties broken uniformly at random.
pub fn argmax_random<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> Result<usize> {
    if values.is_empty() {
        return Err(Error::precondition("argmax over an empty action set"));
    }
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties = values.iter().filter(|&&v| v == best).count();
    if ties <= 1 {
        // NaN-only inputs leave `best` at -inf with no matches; fall back to 0.
        return Ok(values.iter().position(|&v| v == best).unwrap_or(0));
    }
    let pick = rng.random_range(0..ties);
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == best)
        .nth(pick)
        .map(|(i, _)| i)
        .expect("tie index in range"))
}

/// Largest value, or 0 for a state without actions.
pub fn max_or_zero(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn epsilon_greedy<R: Rng + ?Sized>(values: &[f64], epsilon: f64, rng: &mut R) -> Result<usize> {
    if values.is_empty() {
        return Err(Error::precondition("epsilon-greedy over an empty action set"));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::precondition(format!("epsilon {epsilon} outside [0, 1]")));
    }
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        return Ok(rng.random_range(0..values.len()));
    }
    argmax_random(values, rng)
}
