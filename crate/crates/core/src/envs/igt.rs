//! Iowa Gambling Task: four decks with fixed wins and random losses.
//!
//! From the initial state the player picks a deck; the card's win goes to the
//! positive stream and its loss (if any) to the negative stream. The game then
//! returns to the initial state; it never terminates on its own, so the
//! number of draws is set by the rollout horizon.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{Environment, Step, TabularEnvironment};
use crate::error::{Error, Result};
use crate::reward::RewardPair;

pub const STATE_INITIAL: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Deck {
    A,
    B,
    C,
    D,
}

impl Deck {
    pub const ALL: [Deck; 4] = [Deck::A, Deck::B, Deck::C, Deck::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Deck> {
        Deck::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::UnknownDeck(i.to_string()))
    }
}

impl fmt::Display for Deck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Deck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Deck> {
        match s {
            "A" | "a" => Ok(Deck::A),
            "B" | "b" => Ok(Deck::B),
            "C" | "c" => Ok(Deck::C),
            "D" | "d" => Ok(Deck::D),
            other => Err(Error::UnknownDeck(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeckSpec {
    pub win: i64,
    /// `(amount <= 0, probability)`; leftover probability mass means no loss.
    pub losses: Vec<(i64, f64)>,
}

impl DeckSpec {
    fn new(win: i64, losses: &[(i64, f64)]) -> Self {
        DeckSpec {
            win,
            losses: losses.to_vec(),
        }
    }

    pub fn expected_value(&self) -> f64 {
        self.win as f64 + self.losses.iter().map(|&(l, p)| l as f64 * p).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IgtScheme {
    pub id: u8,
    pub decks: [DeckSpec; 4],
}

impl IgtScheme {
    /// The frequent/infrequent-loss payoff schemes; 1 and 2 differ only in
    /// deck C.
    pub fn standard(id: u8) -> Result<Self> {
        let a = DeckSpec::new(100, &[(-150, 0.1), (-200, 0.1), (-250, 0.1), (-300, 0.1), (-350, 0.1)]);
        let b = DeckSpec::new(100, &[(-1250, 0.1)]);
        let c = match id {
            1 => DeckSpec::new(50, &[(-25, 0.1), (-75, 0.1), (-50, 0.3)]),
            2 => DeckSpec::new(50, &[(-50, 0.5)]),
            other => return Err(Error::InvalidInput(format!("unknown IGT scheme {other}"))),
        };
        let d = DeckSpec::new(50, &[(-250, 0.1)]);
        Ok(IgtScheme {
            id,
            decks: [a, b, c, d],
        })
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (deck, spec) in Deck::ALL.iter().zip(&self.decks) {
            let mass: f64 = spec.losses.iter().map(|&(_, p)| p).sum();
            if mass > 1.0 + 1e-12 || spec.losses.iter().any(|&(_, p)| p < 0.0) {
                out.push(format!("deck {deck}: loss probabilities must be >= 0 and sum to <= 1"));
            }
            if spec.win < 0 || spec.losses.iter().any(|&(l, _)| l > 0) {
                out.push(format!("deck {deck}: wins must be >= 0 and losses <= 0"));
            }
        }
        out
    }

    pub fn deck(&self, deck: Deck) -> &DeckSpec {
        &self.decks[deck.index()]
    }

    /// One card from `deck`: the win, plus at most one loss event.
    pub fn draw<R: Rng + ?Sized>(&self, deck: Deck, rng: &mut R) -> RewardPair {
        let spec = self.deck(deck);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut loss = 0.0;
        for &(amount, p) in &spec.losses {
            acc += p;
            if u < acc {
                loss = amount as f64;
                break;
            }
        }
        RewardPair {
            pos: spec.win as f64,
            neg: loss,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IgtEnv {
    scheme: IgtScheme,
    current: usize,
}

impl IgtEnv {
    pub fn new(scheme: IgtScheme) -> Result<Self> {
        let v = scheme.violations();
        if !v.is_empty() {
            return Err(Error::InvalidInput(v.join("; ")));
        }
        Ok(IgtEnv {
            scheme,
            current: STATE_INITIAL,
        })
    }

    pub fn scheme(&self) -> &IgtScheme {
        &self.scheme
    }

    /// Pure transition: from the initial state, action `d` draws a card from
    /// deck `d` and comes back to the initial state.
    pub fn transition<R: Rng + ?Sized>(&self, state: usize, action: usize, rng: &mut R) -> Result<Step<usize>> {
        if state != STATE_INITIAL {
            return Err(Error::InvalidAction { state, action });
        }
        let deck = Deck::from_index(action).map_err(|_| Error::InvalidAction { state, action })?;
        Ok(Step {
            next: STATE_INITIAL,
            reward: self.scheme.draw(deck, rng),
            done: false,
        })
    }
}

impl Environment for IgtEnv {
    type State = usize;

    fn reset(&mut self, _rng: &mut dyn RngCore) -> usize {
        self.current = STATE_INITIAL;
        STATE_INITIAL
    }

    fn num_actions(&self, state: &usize) -> usize {
        if *state == STATE_INITIAL {
            4
        } else {
            0
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

impl TabularEnvironment for IgtEnv {
    fn actions_per_state(&self) -> Vec<usize> {
        vec![4]
    }
}
