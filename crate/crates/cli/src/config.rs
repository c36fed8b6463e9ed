//! Experiment configuration files.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use splitq::agents::LinearRate;
use splitq::envs::{IgtScheme, Layout, NonstationarityMode, ScenarioSpec};
use splitq::tournament::{AgentSpec, ParamOverrides};
use splitq::{AgentKind, AgentParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    MdpTournament,
    Igt,
    Pacman,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::MdpTournament => "mdp-tournament",
            ExperimentKind::Igt => "igt",
            ExperimentKind::Pacman => "pacman",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    /// Agent kind name, e.g. `QL`, `SQL2`, `bvFTD`.
    pub kind: String,
    /// Defaults to the kind name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_pos: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_neg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_pos: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_neg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pain_mixing: Option<f64>,
}

impl AgentEntry {
    pub fn new(kind: &str) -> Self {
        AgentEntry {
            kind: kind.to_string(),
            ..AgentEntry::default()
        }
    }

    pub fn overrides(&self) -> ParamOverrides {
        ParamOverrides {
            lambda_pos: self.lambda_pos,
            lambda_neg: self.lambda_neg,
            w_pos: self.w_pos,
            w_neg: self.w_neg,
            gamma: self.gamma,
            epsilon: self.epsilon,
            lr_exponent: self.lr_exponent,
            pain_mixing: self.pain_mixing,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    /// Standard IGT payoff scheme (1 or 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<u8>,
    /// A fully specified IGT payoff scheme; replaces `scheme`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub igt_scheme: Option<IgtScheme>,
    /// Explicit MDP scenarios; when absent `scenarios` are generated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mdp_scenarios: Option<Vec<ScenarioSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws_per_visit: Option<usize>,
    /// PacMan layout file; the built-in small layout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<NonstationarityMode>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_pos_event: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_neg_event: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_frames: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<LinearRate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Runs per scenario (MDP) or per condition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    /// Number of generated MDP scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenarios: Option<usize>,
    /// Actions per run (MDP, IGT) or episodes per run (PacMan).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    /// Step spacing of the learning-curve file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_window: Option<usize>,
    /// Labels of a sub-pool; summaries then also report average wins
    /// against this pool only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<Vec<String>>,
    /// Not part of the config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub agents: Vec<AgentEntry>,
    #[serde(default)]
    pub environment: EnvironmentConfig,
}

pub const DEFAULT_OUTPUT: &str = "results";
pub const DEFAULT_BATCH_SIZE: usize = 10;
pub const DEFAULT_LINEAR_RATE: LinearRate = LinearRate::Polynomial { exponent: 0.8 };

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

impl ConfigError {
    pub fn messages(&self) -> Vec<String> {
        match self {
            ConfigError::Invalid(v) => v.clone(),
            other => vec![other.to_string()],
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    /// Switches to the large-scale run counts.
    pub fn full_scale(&mut self) {
        match self.kind {
            ExperimentKind::MdpTournament => {
                self.scenarios = Some(100);
                self.runs = Some(100);
            }
            ExperimentKind::Igt => self.runs = Some(200),
            ExperimentKind::Pacman => {}
        }
    }

    /// Fills every unset field with its default.
    pub fn materialize(&mut self) {
        let pacman = self.kind == ExperimentKind::Pacman;
        self.runs.get_or_insert(match self.kind {
            ExperimentKind::MdpTournament => 20,
            ExperimentKind::Igt => 200,
            ExperimentKind::Pacman => 20,
        });
        self.horizon.get_or_insert(if pacman { 300 } else { 500 });
        self.curve_window.get_or_insert(1);
        self.output.get_or_insert_with(|| PathBuf::from(DEFAULT_OUTPUT));
        let env = &mut self.environment;
        match self.kind {
            ExperimentKind::MdpTournament => {
                if env.mdp_scenarios.is_none() {
                    self.scenarios.get_or_insert(100);
                }
                env.draws_per_visit
                    .get_or_insert(splitq::envs::mdp::DEFAULT_DRAWS_PER_VISIT);
            }
            ExperimentKind::Igt => {
                if env.igt_scheme.is_none() {
                    env.scheme.get_or_insert(1);
                }
            }
            ExperimentKind::Pacman => {
                env.modes.get_or_insert_with(|| NonstationarityMode::ALL.to_vec());
                env.batch_size.get_or_insert(DEFAULT_BATCH_SIZE);
                env.p_pos_event.get_or_insert(0.5);
                env.p_neg_event.get_or_insert(0.5);
                env.max_frames.get_or_insert(splitq::envs::pacman::DEFAULT_MAX_FRAMES);
                env.learning_rate.get_or_insert(DEFAULT_LINEAR_RATE);
            }
        }
    }

    /// Every problem with the configuration, not just the first.
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.seed.is_none() {
            errors.push("seed: required (no wall-clock seeding)".to_string());
        }
        if self.agents.is_empty() {
            errors.push("agents: at least one agent is required".to_string());
        }
        let mut labels = HashSet::new();
        for (i, entry) in self.agents.iter().enumerate() {
            match entry.kind.parse::<AgentKind>() {
                Ok(kind) => {
                    let label = entry.label.clone().unwrap_or_else(|| kind.name().to_string());
                    if !labels.insert(label.clone()) {
                        errors.push(format!("agents[{i}].label: duplicate label `{label}`"));
                    }
                }
                Err(_) => errors.push(format!("agents[{i}].kind: unknown agent kind `{}`", entry.kind)),
            }
            let params = entry.overrides().apply(AgentParams::default());
            errors.extend(params.violations().into_iter().map(|v| format!("agents[{i}].{v}")));
        }
        for (name, v) in [
            ("runs", self.runs),
            ("scenarios", self.scenarios),
            ("horizon", self.horizon),
            ("curve_window", self.curve_window),
        ] {
            if v == Some(0) {
                errors.push(format!("{name}: must be >= 1"));
            }
        }
        if let Some(pool) = &self.pool {
            for (i, label) in pool.iter().enumerate() {
                if !labels.contains(label) {
                    errors.push(format!("pool[{i}]: no agent labelled `{label}`"));
                }
            }
        }
        let env = &self.environment;
        let misplaced = |errors: &mut Vec<String>, set: bool, field: &str, kind: &str| {
            if set {
                errors.push(format!("environment.{field}: only applies to kind = \"{kind}\""));
            }
        };
        match self.kind {
            ExperimentKind::MdpTournament => {
                if let Some(h) = self.horizon {
                    if h % 4 != 0 {
                        errors.push(format!(
                            "horizon: must be a multiple of 4 actions (one A-to-end traversal), got {h}"
                        ));
                    }
                }
                if env.draws_per_visit == Some(0) {
                    errors.push("environment.draws_per_visit: must be >= 1".to_string());
                }
                if let Some(list) = &env.mdp_scenarios {
                    if list.is_empty() {
                        errors.push("environment.mdp_scenarios: empty list".to_string());
                    }
                    if self.scenarios.is_some() {
                        errors.push("scenarios: conflicts with environment.mdp_scenarios".to_string());
                    }
                    for (i, s) in list.iter().enumerate() {
                        errors.extend(
                            s.violations()
                                .into_iter()
                                .map(|v| format!("environment.mdp_scenarios[{i}].{v}")),
                        );
                    }
                }
            }
            ExperimentKind::Igt => {
                if let Some(id) = env.scheme {
                    if IgtScheme::standard(id).is_err() {
                        errors.push(format!("environment.scheme: must be 1 or 2, got {id}"));
                    }
                    if env.igt_scheme.is_some() {
                        errors.push("environment.scheme: conflicts with environment.igt_scheme".to_string());
                    }
                }
                if let Some(s) = &env.igt_scheme {
                    errors.extend(
                        s.violations()
                            .into_iter()
                            .map(|v| format!("environment.igt_scheme: {v}")),
                    );
                }
            }
            ExperimentKind::Pacman => {
                if env.batch_size == Some(0) {
                    errors.push("environment.batch_size: must be >= 1".to_string());
                }
                if env.max_frames == Some(0) {
                    errors.push("environment.max_frames: must be >= 1".to_string());
                }
                for (name, p) in [("p_pos_event", env.p_pos_event), ("p_neg_event", env.p_neg_event)] {
                    if let Some(p) = p {
                        if !(0.0..=1.0).contains(&p) {
                            errors.push(format!("environment.{name}: must lie in [0, 1], got {p}"));
                        }
                    }
                }
                if let Some(modes) = &env.modes {
                    if modes.is_empty() {
                        errors.push("environment.modes: empty list".to_string());
                    }
                    let distinct: HashSet<_> = modes.iter().collect();
                    if distinct.len() != modes.len() {
                        errors.push("environment.modes: duplicate mode".to_string());
                    }
                }
                match env.learning_rate {
                    Some(LinearRate::Constant(a)) if !(a > 0.0 && a <= 1.0) => errors.push(format!(
                        "environment.learning_rate: constant rate must lie in (0, 1], got {a}"
                    )),
                    Some(LinearRate::Polynomial { exponent }) if !(exponent > 0.0 && exponent.is_finite()) => errors
                        .push(format!(
                            "environment.learning_rate: exponent must be > 0, got {exponent}"
                        )),
                    _ => {}
                }
                if let Some(path) = &env.layout {
                    if let Err(e) = Layout::load(path) {
                        errors.push(format!("environment.layout: {e}"));
                    }
                }
                if self.scenarios.is_some() {
                    errors.push("scenarios: only applies to kind = \"mdp-tournament\"".to_string());
                }
            }
        }
        let kind = self.kind;
        let not_mdp = kind != ExperimentKind::MdpTournament;
        let not_igt = kind != ExperimentKind::Igt;
        let not_pacman = kind != ExperimentKind::Pacman;
        misplaced(
            &mut errors,
            not_mdp && env.mdp_scenarios.is_some(),
            "mdp_scenarios",
            "mdp-tournament",
        );
        misplaced(
            &mut errors,
            not_mdp && env.draws_per_visit.is_some(),
            "draws_per_visit",
            "mdp-tournament",
        );
        misplaced(&mut errors, not_igt && env.scheme.is_some(), "scheme", "igt");
        misplaced(&mut errors, not_igt && env.igt_scheme.is_some(), "igt_scheme", "igt");
        for (field, set) in [
            ("layout", env.layout.is_some()),
            ("modes", env.modes.is_some()),
            ("batch_size", env.batch_size.is_some()),
            ("p_pos_event", env.p_pos_event.is_some()),
            ("p_neg_event", env.p_neg_event.is_some()),
            ("max_frames", env.max_frames.is_some()),
            ("learning_rate", env.learning_rate.is_some()),
        ] {
            misplaced(&mut errors, not_pacman && set, field, "pacman");
        }
        if kind == ExperimentKind::Igt && self.scenarios.is_some() {
            errors.push("scenarios: only applies to kind = \"mdp-tournament\"".to_string());
        }
        errors
    }

    /// Tournament entrants in config order. Call after validation.
    pub fn agent_specs(&self) -> Vec<AgentSpec> {
        self.agents
            .iter()
            .map(|e| {
                let kind: AgentKind = e.kind.parse().expect("validated agent kind");
                AgentSpec {
                    label: e.label.clone().unwrap_or_else(|| kind.name().to_string()),
                    kind,
                    overrides: e.overrides(),
                }
            })
            .collect()
    }

    /// Everything except the output location.
    pub fn without_output(&self) -> Self {
        let mut c = self.clone();
        c.output = None;
        c
    }

    /// The text that is hashed to identify a config.
    pub fn canonical(&self) -> String {
        self.without_output().to_toml()
    }
}

/// Reads, validates and materializes a config file. `seed` overrides the
/// file's seed; a relative layout path is taken relative to the file.
pub fn parse_config(path: &Path, seed: Option<u64>, full_scale: bool) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    if full_scale {
        cfg.full_scale();
    }
    if let (Some(layout), Some(dir)) = (cfg.environment.layout.as_mut(), path.parent()) {
        if layout.is_relative() {
            *layout = dir.join(&*layout);
        }
    }
    let errors = cfg.validate();
    if !errors.is_empty() {
        return Err(ConfigError::Invalid(errors));
    }
    cfg.materialize();
    Ok(cfg)
}
