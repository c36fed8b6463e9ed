use rand::Rng;

use super::AgentKind;
use crate::params::AgentParams;

/// `mean ± half_width`, sampled uniformly once per agent instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetRange {
    pub mean: f64,
    pub half_width: f64,
}

const fn pm(mean: f64, half_width: f64) -> PresetRange {
    PresetRange { mean, half_width }
}

const fn exact(v: f64) -> PresetRange {
    pm(v, 0.0)
}

impl PresetRange {
    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        if self.half_width == 0.0 {
            return self.mean.max(0.0);
        }
        let lo = self.mean - self.half_width;
        let hi = self.mean + self.half_width;
        rng.random_range(lo..=hi).max(0.0)
    }
}

impl AgentKind {
    /// `(lambda_pos, w_pos, lambda_neg, w_neg)` ranges for split-family kinds.
    pub fn bias_ranges(self) -> Option<[PresetRange; 4]> {
        let ranges = match self {
            AgentKind::Sql | AgentKind::Sql2 => [exact(1.0), exact(1.0), exact(1.0), exact(1.0)],
            AgentKind::Pql => [exact(1.0), exact(1.0), exact(0.0), exact(0.0)],
            AgentKind::Nql => [exact(0.0), exact(0.0), exact(1.0), exact(1.0)],
            AgentKind::Addiction => [pm(1.0, 0.1), pm(1.0, 0.1), pm(0.5, 0.1), pm(1.0, 0.1)],
            AgentKind::Adhd => [pm(0.2, 0.1), pm(1.0, 0.1), pm(0.2, 0.1), pm(1.0, 0.1)],
            AgentKind::Alzheimers => [pm(0.1, 0.1), pm(1.0, 0.1), pm(0.1, 0.1), pm(1.0, 0.1)],
            AgentKind::ChronicPain => [pm(0.5, 0.1), pm(0.5, 0.1), pm(1.0, 0.1), pm(1.0, 0.1)],
            AgentKind::Bvftd => [pm(0.5, 0.1), pm(100.0, 10.0), pm(0.5, 0.1), pm(1.0, 0.1)],
            AgentKind::Parkinsons => [pm(0.5, 0.1), pm(1.0, 0.1), pm(0.5, 0.1), pm(100.0, 10.0)],
            AgentKind::Moderate => [pm(0.5, 0.1), pm(1.0, 0.1), pm(0.5, 0.1), pm(1.0, 0.1)],
            AgentKind::Ql | AgentKind::Dql | AgentKind::Sarsa | AgentKind::MaxPain => return None,
        };
        Some(ranges)
    }
}

/// Draws the bias parameters for `kind` on top of the default learning
/// settings. Non-split kinds get the neutral `(1, 1, 1, 1)` biases, which
/// their update rules ignore. Sampled values are clamped below at 0.
pub fn preset_params<R: Rng + ?Sized>(kind: AgentKind, rng: &mut R) -> AgentParams {
    match kind.bias_ranges() {
        Some([lp, wp, ln, wn]) => {
            let lambda_pos = lp.sample(rng);
            let w_pos = wp.sample(rng);
            let lambda_neg = ln.sample(rng);
            let w_neg = wn.sample(rng);
            AgentParams::with_biases(lambda_pos, w_pos, lambda_neg, w_neg)
        }
        None => AgentParams::default(),
    }
}
