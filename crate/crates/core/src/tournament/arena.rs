use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rollout::{run_rollout, Horizon, Record, Trajectory};
use crate::agents::{preset_params, AgentKind, LinearAgent, LinearRate, TabularAgent};
use crate::envs::{
    generate_scenario, IgtEnv, IgtScheme, Layout, MdpEnv, NonstationarityConfig, Nonstationary, PacmanEnv,
    PacmanFeatures, ScenarioSpec, TabularEnvironment,
};
use crate::error::{Error, Result};
use crate::params::AgentParams;
use crate::seed::{label_id, Role, RunSeed, StreamPath};

/// Optional per-agent replacements for sampled or default parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub lambda_pos: Option<f64>,
    pub lambda_neg: Option<f64>,
    pub w_pos: Option<f64>,
    pub w_neg: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub lr_exponent: Option<f64>,
    pub pain_mixing: Option<f64>,
}

impl ParamOverrides {
    pub fn apply(&self, mut p: AgentParams) -> AgentParams {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut p.lambda_pos, self.lambda_pos);
        set(&mut p.lambda_neg, self.lambda_neg);
        set(&mut p.w_pos, self.w_pos);
        set(&mut p.w_neg, self.w_neg);
        set(&mut p.gamma, self.gamma);
        set(&mut p.epsilon, self.epsilon);
        set(&mut p.lr_exponent, self.lr_exponent);
        set(&mut p.pain_mixing, self.pain_mixing);
        p
    }
}

/// A tournament entrant. The label keys the entrant's random streams, so two
/// entrants with the same label behave identically.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec {
    pub label: String,
    pub kind: AgentKind,
    pub overrides: ParamOverrides,
}

impl AgentSpec {
    pub fn new(kind: AgentKind) -> Self {
        AgentSpec {
            label: kind.name().to_string(),
            kind,
            overrides: ParamOverrides::default(),
        }
    }

    fn path(&self, scenario: usize, run: usize, role: Role) -> StreamPath {
        StreamPath::new(scenario as u64, run as u64, label_id(&self.label), role)
    }

    /// Parameters of this entrant's instance for one (scenario, run).
    pub fn params(&self, seed: RunSeed, scenario: usize, run: usize) -> AgentParams {
        let mut rng = seed.stream(self.path(scenario, run, Role::Params));
        self.overrides.apply(preset_params(self.kind, &mut rng))
    }

    pub fn exploration(&self, seed: RunSeed, scenario: usize, run: usize) -> ChaCha8Rng {
        seed.stream(self.path(scenario, run, Role::Exploration))
    }

    pub fn tabular(
        &self,
        env: &impl TabularEnvironment,
        seed: RunSeed,
        scenario: usize,
        run: usize,
    ) -> Result<TabularAgent> {
        TabularAgent::new(
            self.kind,
            self.params(seed, scenario, run),
            &env.actions_per_state(),
            self.exploration(seed, scenario, run),
        )
    }
}

pub fn env_stream(seed: RunSeed, scenario: usize, run: usize) -> ChaCha8Rng {
    seed.stream(StreamPath::shared(scenario as u64, run as u64, Role::Environment))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub scenario: usize,
    pub run: usize,
    /// The number agents are compared on.
    pub score: f64,
    pub trajectory: Trajectory,
}

/// What a single pairwise outcome is decided on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareUnit {
    /// Mean score over a scenario's runs.
    Scenario,
    /// Each run separately.
    Run,
}

/// A family of environments agents are evaluated in.
pub trait Arena: Sync {
    fn num_scenarios(&self) -> usize;

    fn compare_unit(&self) -> CompareUnit;

    fn play(&self, agent: &AgentSpec, scenario: usize, run: usize, seed: RunSeed, record: Record) -> Result<RunResult>;
}

/// Randomly generated bimodal MDP scenarios.
#[derive(Debug, Clone)]
pub struct MdpArena {
    pub scenarios: Vec<ScenarioSpec>,
    /// A→terminal traversals per run.
    pub traversals: usize,
}

/// Traversals corresponding to a 500-action trial (four steps per traversal).
pub const DEFAULT_TRAVERSALS: usize = 125;

impl MdpArena {
    pub fn generate(count: usize, seed: RunSeed, traversals: usize) -> Self {
        let scenarios = (0..count)
            .map(|i| generate_scenario(&mut seed.stream(StreamPath::shared(i as u64, 0, Role::Scenario))))
            .collect();
        MdpArena { scenarios, traversals }
    }
}

impl Arena for MdpArena {
    fn num_scenarios(&self) -> usize {
        self.scenarios.len()
    }

    fn compare_unit(&self) -> CompareUnit {
        CompareUnit::Scenario
    }

    fn play(&self, agent: &AgentSpec, scenario: usize, run: usize, seed: RunSeed, record: Record) -> Result<RunResult> {
        let spec = self
            .scenarios
            .get(scenario)
            .ok_or_else(|| Error::InvalidInput(format!("no scenario {scenario}")))?;
        let mut env = MdpEnv::new(*spec)?;
        let mut learner = agent.tabular(&env, seed, scenario, run)?;
        let trajectory = run_rollout(
            &mut learner,
            &mut env,
            Horizon::Episodes(self.traversals),
            env_stream(seed, scenario, run),
            record,
        )?;
        Ok(RunResult {
            scenario,
            run,
            score: trajectory.total(),
            trajectory,
        })
    }
}

#[derive(Debug, Clone)]
pub struct IgtArena {
    pub scheme: IgtScheme,
    pub actions: usize,
}

impl Arena for IgtArena {
    fn num_scenarios(&self) -> usize {
        1
    }

    fn compare_unit(&self) -> CompareUnit {
        CompareUnit::Run
    }

    fn play(&self, agent: &AgentSpec, scenario: usize, run: usize, seed: RunSeed, record: Record) -> Result<RunResult> {
        let mut env = IgtEnv::new(self.scheme.clone())?;
        let mut learner = agent.tabular(&env, seed, scenario, run)?;
        let trajectory = run_rollout(
            &mut learner,
            &mut env,
            Horizon::Actions(self.actions),
            env_stream(seed, scenario, run),
            record,
        )?;
        Ok(RunResult {
            scenario,
            run,
            score: trajectory.total(),
            trajectory,
        })
    }
}

/// PacMan under one reward process; a run is one agent learning over
/// `episodes` consecutive games, scored by its mean game score.
#[derive(Debug, Clone)]
pub struct PacmanArena {
    pub layout: Layout,
    pub nonstationarity: NonstationarityConfig,
    pub episodes: usize,
    pub rate: LinearRate,
    pub max_frames: u32,
}

impl Arena for PacmanArena {
    fn num_scenarios(&self) -> usize {
        1
    }

    fn compare_unit(&self) -> CompareUnit {
        CompareUnit::Run
    }

    fn play(&self, agent: &AgentSpec, scenario: usize, run: usize, seed: RunSeed, record: Record) -> Result<RunResult> {
        let base = PacmanEnv::new(self.layout.clone()).with_max_frames(self.max_frames);
        let events = seed.stream(StreamPath::shared(scenario as u64, run as u64, Role::Events));
        let mut env = Nonstationary::new(base, self.nonstationarity, events)?;
        let mut learner = LinearAgent::new(
            agent.kind,
            agent.params(seed, scenario, run),
            PacmanFeatures,
            self.rate,
            agent.exploration(seed, scenario, run),
        )?;
        let trajectory = run_rollout(
            &mut learner,
            &mut env,
            Horizon::Episodes(self.episodes),
            env_stream(seed, scenario, run),
            record,
        )?;
        Ok(RunResult {
            scenario,
            run,
            score: trajectory.mean_episode_score(),
            trajectory,
        })
    }
}

/// Every entrant's results over every (scenario, run).
#[derive(Debug, Clone)]
pub struct ScoreTable {
    pub labels: Vec<String>,
    pub scenarios: usize,
    pub runs: usize,
    pub unit: CompareUnit,
    /// `results[agent][scenario * runs + run]`.
    pub results: Vec<Vec<RunResult>>,
}

impl ScoreTable {
    /// One score per comparison unit for `agent`.
    pub fn unit_scores(&self, agent: usize) -> Vec<f64> {
        let rs = &self.results[agent];
        match self.unit {
            CompareUnit::Run => rs.iter().map(|r| r.score).collect(),
            CompareUnit::Scenario => rs
                .chunks(self.runs)
                .map(|c| c.iter().map(|r| r.score).sum::<f64>() / c.len() as f64)
                .collect(),
        }
    }

    pub fn all_unit_scores(&self) -> Vec<Vec<f64>> {
        (0..self.labels.len()).map(|a| self.unit_scores(a)).collect()
    }

    /// Mean score and its standard error over all runs of `agent`.
    pub fn mean_score(&self, agent: usize) -> (f64, f64) {
        let xs: Vec<f64> = self.results[agent].iter().map(|r| r.score).collect();
        mean_stderr(&xs)
    }
}

pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Plays every entrant through every (scenario, run) on the rayon pool.
/// Results are independent of thread scheduling.
pub fn score_table<A: Arena>(
    arena: &A,
    agents: &[AgentSpec],
    runs: usize,
    seed: RunSeed,
    record: Record,
) -> Result<ScoreTable> {
    if runs == 0 || arena.num_scenarios() == 0 || agents.is_empty() {
        return Err(Error::precondition("need at least one agent, scenario and run"));
    }
    let scenarios = arena.num_scenarios();
    let jobs: Vec<(usize, usize, usize)> = (0..agents.len())
        .flat_map(|a| (0..scenarios).flat_map(move |s| (0..runs).map(move |r| (a, s, r))))
        .collect();
    let flat: Vec<RunResult> = jobs
        .par_iter()
        .map(|&(a, s, r)| arena.play(&agents[a], s, r, seed, record))
        .collect::<Result<_>>()?;
    let per_agent = scenarios * runs;
    let mut results = Vec::with_capacity(agents.len());
    let mut it = flat.into_iter();
    for _ in 0..agents.len() {
        results.push(it.by_ref().take(per_agent).collect());
    }
    Ok(ScoreTable {
        labels: agents.iter().map(|a| a.label.clone()).collect(),
        scenarios,
        runs,
        unit: arena.compare_unit(),
        results,
    })
}

/// `(x wins, y wins, ties)` over the arena's comparison units, with both
/// entrants facing identical environment draws.
pub fn pairwise_compare<A: Arena>(
    arena: &A,
    x: &AgentSpec,
    y: &AgentSpec,
    runs: usize,
    seed: RunSeed,
) -> Result<(u32, u32, u32)> {
    let table = score_table(arena, &[x.clone(), y.clone()], runs, seed, Record::Summary)?;
    Ok(super::aggregate::pairwise_counts(
        &table.unit_scores(0),
        &table.unit_scores(1),
    ))
}
