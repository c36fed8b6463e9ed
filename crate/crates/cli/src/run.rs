//! Runs a validated experiment and writes its output files.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use splitq::envs::{IgtScheme, Layout, NonstationarityConfig};
use splitq::params::{DEFAULT_EPSILON, DEFAULT_GAMMA, DEFAULT_LR_EXPONENT, DEFAULT_PAIN_MIXING};
use splitq::tournament::{
    aggregate, learning_curve, score_table, AgentSpec, CurvePoint, IgtArena, MdpArena, PacmanArena, Record, ScoreTable,
    TournamentResult,
};
use splitq::RunSeed;

use crate::config::{ExperimentConfig, ExperimentKind, DEFAULT_BATCH_SIZE, DEFAULT_LINEAR_RATE};

pub const AVG_WINS_FORMULA: &str =
    "avg_wins[i] = 100 * mean over opponents j != i of wins[i][j] / (wins[i][j] + wins[j][i]); \
     pairs with no decided unit count as 50; ties count for neither side";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] splitq::Error),
    #[error("worker panicked: {0}")]
    Panic(String),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub export_trajectories: bool,
}

/// The environment family behind one condition.
#[derive(Debug, Clone)]
pub enum ConditionArena {
    Mdp(MdpArena),
    Igt(IgtArena),
    Pacman(PacmanArena),
}

/// One independently evaluated setting, e.g. one PacMan reward process.
#[derive(Debug, Clone)]
pub struct Condition {
    pub name: String,
    pub arena: ConditionArena,
}

impl Condition {
    pub fn play(&self, agents: &[AgentSpec], runs: usize, seed: RunSeed, record: Record) -> splitq::Result<ScoreTable> {
        match &self.arena {
            ConditionArena::Mdp(a) => score_table(a, agents, runs, seed, record),
            ConditionArena::Igt(a) => score_table(a, agents, runs, seed, record),
            ConditionArena::Pacman(a) => score_table(a, agents, runs, seed, record),
        }
    }
}

/// Builds the conditions of a materialized config.
pub fn conditions(cfg: &ExperimentConfig) -> splitq::Result<Vec<Condition>> {
    let seed = RunSeed::new(cfg.seed.expect("validated config has a seed"));
    let horizon = cfg.horizon.expect("materialized");
    let env = &cfg.environment;
    Ok(match cfg.kind {
        ExperimentKind::MdpTournament => {
            let traversals = horizon / 4;
            let arena = match &env.mdp_scenarios {
                Some(list) => MdpArena {
                    scenarios: list.clone(),
                    traversals,
                },
                None => {
                    let mut arena = MdpArena::generate(cfg.scenarios.expect("materialized"), seed, traversals);
                    if let Some(d) = env.draws_per_visit {
                        for s in &mut arena.scenarios {
                            s.draws_per_visit = d;
                        }
                    }
                    arena
                }
            };
            vec![Condition {
                name: "mdp".into(),
                arena: ConditionArena::Mdp(arena),
            }]
        }
        ExperimentKind::Igt => {
            let scheme = match &env.igt_scheme {
                Some(s) => s.clone(),
                None => IgtScheme::standard(env.scheme.unwrap_or(1))?,
            };
            vec![Condition {
                name: format!("scheme{}", scheme.id),
                arena: ConditionArena::Igt(IgtArena {
                    scheme,
                    actions: horizon,
                }),
            }]
        }
        ExperimentKind::Pacman => {
            let layout = match &env.layout {
                Some(path) => Layout::load(path)?,
                None => Layout::default_small(),
            };
            let modes = env.modes.clone().unwrap_or_default();
            modes
                .into_iter()
                .map(|mode| {
                    let mut ns = NonstationarityConfig::new(mode, env.batch_size.unwrap_or(DEFAULT_BATCH_SIZE));
                    ns.p_pos_event = env.p_pos_event.unwrap_or(ns.p_pos_event);
                    ns.p_neg_event = env.p_neg_event.unwrap_or(ns.p_neg_event);
                    Condition {
                        name: mode.name().to_string(),
                        arena: ConditionArena::Pacman(PacmanArena {
                            layout: layout.clone(),
                            nonstationarity: ns,
                            episodes: horizon,
                            rate: env.learning_rate.unwrap_or(DEFAULT_LINEAR_RATE),
                            max_frames: env.max_frames.unwrap_or(splitq::envs::pacman::DEFAULT_MAX_FRAMES),
                        }),
                    }
                })
                .collect()
        }
    })
}

/// Per-condition results.
#[derive(Debug, Clone)]
pub struct ConditionResult {
    pub name: String,
    pub table: ScoreTable,
    pub tournament: TournamentResult,
    pub curves: Vec<Vec<CurvePoint>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Defaults {
    pub gamma: f64,
    pub epsilon: f64,
    pub lr_exponent: f64,
    pub pain_mixing: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub conditions: Vec<String>,
    pub files: Vec<String>,
    pub avg_wins_formula: String,
    pub defaults: Defaults,
    pub config: ExperimentConfig,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    format!("{:x}", Sha256::digest(cfg.canonical().as_bytes()))
}

/// Fixed-precision, locale-independent number formatting.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(hash: &str, header: &str) -> Self {
        Csv {
            text: format!("# config-hash: {hash}\n{header}\n"),
        }
    }

    fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }
}

struct Writer<'a> {
    dir: &'a Path,
    hash: String,
    files: Vec<String>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, csv: Csv) -> Result<(), RunError> {
        self.write_raw(name, &csv.text)
    }

    fn write_raw(&mut self, name: &str, text: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|source| RunError::Io { path, source })?;
        self.files.push(name.to_string());
        Ok(())
    }
}

fn suffixed(base: &str, condition: &str, per_condition: bool) -> String {
    if per_condition {
        format!("{base}_{condition}.csv")
    } else {
        format!("{base}.csv")
    }
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

/// Runs `cfg` (validated and materialized) and writes every output file
/// into `out`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path, opts: RunOptions) -> Result<Manifest, RunError> {
    run_experiment_with(cfg, out, opts, |c, agents, runs, seed, record| {
        c.play(agents, runs, seed, record)
    })
}

/// As [`run_experiment`] with a custom condition evaluator.
pub fn run_experiment_with<F>(
    cfg: &ExperimentConfig,
    out: &Path,
    opts: RunOptions,
    play: F,
) -> Result<Manifest, RunError>
where
    F: Fn(&Condition, &[AgentSpec], usize, RunSeed, Record) -> splitq::Result<ScoreTable>,
{
    std::fs::create_dir_all(out).map_err(|source| RunError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let seed_value = cfg.seed.expect("validated config has a seed");
    let seed = RunSeed::new(seed_value);
    let agents = cfg.agent_specs();
    let runs = cfg.runs.expect("materialized");
    let window = cfg.curve_window.expect("materialized");
    let per_condition = cfg.kind == ExperimentKind::Pacman;
    let record = if opts.export_trajectories {
        Record::Full
    } else {
        Record::Curve
    };
    let pool: Option<Vec<usize>> = cfg.pool.as_ref().map(|labels| {
        labels
            .iter()
            .map(|l| agents.iter().position(|a| &a.label == l).expect("validated pool"))
            .collect()
    });

    let mut writer = Writer {
        dir: out,
        hash: config_hash(cfg),
        files: Vec::new(),
    };
    let mut manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: writer.hash.clone(),
        seed: seed_value,
        complete: false,
        error: None,
        conditions: Vec::new(),
        files: Vec::new(),
        avg_wins_formula: AVG_WINS_FORMULA.to_string(),
        defaults: Defaults {
            gamma: DEFAULT_GAMMA,
            epsilon: DEFAULT_EPSILON,
            lr_exponent: DEFAULT_LR_EXPONENT,
            pain_mixing: DEFAULT_PAIN_MIXING,
        },
        config: cfg.without_output(),
    };

    let mut results = Vec::new();
    let mut failure = None;
    for condition in conditions(cfg)? {
        let attempt = catch_unwind(AssertUnwindSafe(|| play(&condition, &agents, runs, seed, record)));
        match attempt {
            Ok(Ok(table)) => {
                let result = summarize(&condition, table, window)?;
                write_condition(&mut writer, &result, per_condition, opts)?;
                manifest.conditions.push(result.name.clone());
                results.push(result);
            }
            Ok(Err(e)) => {
                failure = Some(RunError::Core(e));
                break;
            }
            Err(payload) => {
                failure = Some(RunError::Panic(panic_message(payload)));
                break;
            }
        }
    }

    write_summary(&mut writer, &results, pool.as_deref())?;
    manifest.complete = failure.is_none();
    manifest.error = failure.as_ref().map(|e| e.to_string());
    manifest.files = writer.files.clone();
    manifest.files.push("manifest.json".into());
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    writer.write_raw("manifest.json", &(json + "\n"))?;
    match failure {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}

fn summarize(condition: &Condition, table: ScoreTable, window: usize) -> Result<ConditionResult, RunError> {
    let tournament = aggregate(table.labels.clone(), table.all_unit_scores())?;
    let curves = (0..table.labels.len())
        .map(|a| {
            let series: Vec<&[f64]> = table.results[a]
                .iter()
                .map(|r| match condition.arena {
                    ConditionArena::Pacman(_) => r.trajectory.episode_scores.as_slice(),
                    _ => r.trajectory.cumulative.as_slice(),
                })
                .collect();
            learning_curve(&series, window)
        })
        .collect::<splitq::Result<_>>()?;
    Ok(ConditionResult {
        name: condition.name.clone(),
        table,
        tournament,
        curves,
    })
}

fn write_condition(
    writer: &mut Writer<'_>,
    result: &ConditionResult,
    per_condition: bool,
    opts: RunOptions,
) -> Result<(), RunError> {
    let hash = writer.hash.clone();
    let t = &result.tournament;
    let labels = &t.labels;

    let mut matrix = Csv::new(&hash, &format!("agent,{}", labels.join(",")));
    for (i, label) in labels.iter().enumerate() {
        let mut row = vec![label.clone()];
        row.extend((0..labels.len()).map(|j| {
            if i == j {
                String::new()
            } else {
                t.wins[i][j].to_string()
            }
        }));
        matrix.row(&row);
    }
    writer.write(&suffixed("matrix", &result.name, per_condition), matrix)?;

    let mut long = Csv::new(&hash, "rowAgent,colAgent,wins,losses,ties");
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            if i != j {
                long.row(&[
                    labels[i].clone(),
                    labels[j].clone(),
                    t.wins[i][j].to_string(),
                    t.wins[j][i].to_string(),
                    t.ties[i][j].to_string(),
                ]);
            }
        }
    }
    writer.write(&suffixed("matrix_long", &result.name, per_condition), long)?;

    if opts.export_trajectories {
        let mut traj = Csv::new(&hash, "agent,run,step,pos_cum,neg_cum,combined_cum");
        for (label, runs) in labels.iter().zip(&result.table.results) {
            for (index, run) in runs.iter().enumerate() {
                let (mut pos, mut neg, mut combined) = (0.0, 0.0, 0.0);
                for (step, rec) in run.trajectory.steps.iter().enumerate() {
                    pos += rec.reward.pos;
                    neg += rec.reward.neg;
                    combined += rec.reward.combined();
                    traj.row(&[
                        label.clone(),
                        index.to_string(),
                        (step + 1).to_string(),
                        num(pos),
                        num(neg),
                        num(combined),
                    ]);
                }
            }
        }
        writer.write(&suffixed("trajectories", &result.name, per_condition), traj)?;
    }
    Ok(())
}

fn write_summary(writer: &mut Writer<'_>, results: &[ConditionResult], pool: Option<&[usize]>) -> Result<(), RunError> {
    let hash = writer.hash.clone();
    let mut summary = Csv::new(
        &hash,
        "condition,agent,runs,mean_score,stderr,avg_wins,avg_ranking,avg_wins_pool",
    );
    let mut scores = Csv::new(&hash, "condition,agent,scenario,run,score");
    let mut curves = Csv::new(&hash, "condition,agent,step,mean,stderr");
    for r in results {
        let t = &r.tournament;
        for (a, label) in t.labels.iter().enumerate() {
            let (mean, se) = r.table.mean_score(a);
            let pooled = pool.map_or(String::new(), |p| num(t.avg_wins_against(a, p)));
            summary.row(&[
                r.name.clone(),
                label.clone(),
                r.table.results[a].len().to_string(),
                num(mean),
                num(se),
                num(t.avg_wins[a]),
                num(t.avg_ranking[a]),
                pooled,
            ]);
            for run in &r.table.results[a] {
                scores.row(&[
                    r.name.clone(),
                    label.clone(),
                    run.scenario.to_string(),
                    run.run.to_string(),
                    num(run.score),
                ]);
            }
            for p in &r.curves[a] {
                curves.row(&[
                    r.name.clone(),
                    label.clone(),
                    p.step.to_string(),
                    num(p.mean),
                    num(p.stderr),
                ]);
            }
        }
    }
    writer.write("summary.csv", summary)?;
    writer.write("scores.csv", scores)?;
    writer.write("curves.csv", curves)
}
