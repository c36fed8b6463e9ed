//! Deterministic stream derivation.
//!
//! Every random consumer (exploration, environment draws, preset sampling,
//! non-stationarity events, scenario generation) gets its own ChaCha8 stream
//! keyed by `(master, scenario, run, agent, role)`. Streams are independent of
//! scheduling order, so jobs can run on any worker and still reproduce.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// What a derived stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Exploration,
    Environment,
    Params,
    Events,
    Scenario,
}

impl Role {
    fn tag(self) -> u64 {
        match self {
            Role::Exploration => 0x45_58_50_4c,
            Role::Environment => 0x45_4e_56_49,
            Role::Params => 0x50_41_52_41,
            Role::Events => 0x45_56_45_4e,
            Role::Scenario => 0x53_43_45_4e,
        }
    }
}

/// Coordinates of one derived stream below a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamPath {
    pub scenario: u64,
    pub run: u64,
    pub agent: u64,
    pub role: Role,
}

impl StreamPath {
    pub fn new(scenario: u64, run: u64, agent: u64, role: Role) -> Self {
        StreamPath {
            scenario,
            run,
            agent,
            role,
        }
    }

    /// Path for a stream that is shared by every agent (environment draws,
    /// events, scenarios).
    pub fn shared(scenario: u64, run: u64, role: Role) -> Self {
        StreamPath::new(scenario, run, 0, role)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RunSeed {
    pub master: u64,
}

impl RunSeed {
    pub fn new(master: u64) -> Self {
        RunSeed { master }
    }

    pub fn stream(&self, path: StreamPath) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        let mut state = splitmix64(self.master ^ 0x5eed_5eed_5eed_5eed);
        for part in [path.scenario, path.run, path.agent, path.role.tag()] {
            state = splitmix64(state ^ splitmix64(part.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        for chunk in seed.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

/// Stable 64-bit identifier for an agent label (FNV-1a).
pub fn label_id(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
