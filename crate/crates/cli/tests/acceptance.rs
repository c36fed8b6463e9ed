//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p splitq-cli --test acceptance`. Criteria
//! 4 to 7 use the shipped configs in `configs/`; criterion 9 reruns them
//! through the binary and compares every output file byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splitq::agents::sql_update;
use splitq::envs::igt::Deck;
use splitq::envs::nonstationary::{transform, ActiveEvents};
use splitq::envs::{Environment, FiniteMdp, IgtScheme, NonstationarityMode, Outcome, RewardDist};
use splitq::{AgentKind, AgentParams, Learner, QTables, RewardPair, TabularAgent};
use splitq_cli::{parse_config, run_experiment, RunOptions};

/// The seed of the shipped configs, reused for the direct draws here.
const MASTER_SEED: u64 = 2024;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within_budget(v: Verdict, elapsed: Duration, budget: Duration) -> Verdict {
    if elapsed > budget {
        verdict(false, format!("{} (over the {:?} budget)", v.detail, budget))
    } else {
        v
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn tabular(kind: AgentKind, env: &FiniteMdp, seed: u64) -> TabularAgent {
    let aps: Vec<usize> = (0..env.transitions().len()).map(|s| env.num_actions(&s)).collect();
    TabularAgent::new(kind, AgentParams::default(), &aps, rng(seed)).unwrap()
}

fn criterion_1() -> Verdict {
    let o = |prob, next, r| Outcome {
        prob,
        next,
        reward: RewardDist::Const(r),
    };
    let env = FiniteMdp::new(
        vec![
            vec![vec![o(0.6, 1, 1.0), o(0.4, 2, 0.0)], vec![o(1.0, 0, 0.3)]],
            vec![
                vec![o(0.5, 0, 2.0), o(0.5, 2, 0.5)],
                vec![o(0.8, 1, 0.0), o(0.2, 2, 4.0)],
            ],
            vec![
                vec![o(0.7, 0, 1.5), o(0.3, 2, 0.0)],
                vec![o(0.5, 1, 0.2), o(0.5, 2, 0.7)],
            ],
        ],
        0,
    )
    .unwrap();
    let mut ql = tabular(AgentKind::Ql, &env, 1);
    let mut sql = tabular(AgentKind::Sql, &env, 1);
    let (mut e1, mut e2) = (env.clone(), env.clone());
    let (mut r1, mut r2) = (rng(2), rng(2));
    let (mut s1, mut s2) = (e1.reset(&mut r1), e2.reset(&mut r2));
    let mut worst: f64 = 0.0;
    for t in 0..10_000 {
        let n = e1.num_actions(&s1);
        let (a1, a2) = (ql.act(&s1, n).unwrap(), sql.act(&s2, n).unwrap());
        if a1 != a2 {
            return verdict(false, format!("actions differ at step {t}"));
        }
        let (p1, p2) = (e1.step(a1, &mut r1).unwrap(), e2.step(a2, &mut r2).unwrap());
        let n1 = e1.num_actions(&p1.next);
        ql.learn(&s1, a1, p1.reward, Some((&p1.next, n1))).unwrap();
        sql.learn(&s2, a2, p2.reward, Some((&p2.next, n1))).unwrap();
        for (x, y) in ql.tables().combined.iter().zip(&sql.tables().positive) {
            worst = worst.max((x - y).abs());
        }
        (s1, s2) = (p1.next, p2.next);
    }
    verdict(
        worst <= 1e-12,
        format!("10000 identical actions, max |Q+ - Q| = {worst:.1e}"),
    )
}

/// Exact value iteration for a deterministic chain with terminal `n - 1`.
fn chain_optimum(n: usize, gamma: f64) -> Vec<[f64; 2]> {
    let reward = |s: usize, a: usize| match a {
        0 => -0.1,
        _ if s + 2 == n => 1.0,
        _ => 0.0,
    };
    let next = |s: usize, a: usize| if a == 0 { s.saturating_sub(1) } else { s + 1 };
    let mut q = vec![[0.0f64; 2]; n - 1];
    for _ in 0..5_000 {
        let v: Vec<f64> = (0..n)
            .map(|s| if s + 1 == n { 0.0 } else { q[s][0].max(q[s][1]) })
            .collect();
        for (s, row) in q.iter_mut().enumerate() {
            for (a, value) in row.iter_mut().enumerate() {
                *value = reward(s, a) + gamma * v[next(s, a)];
            }
        }
    }
    q
}

fn criterion_2() -> Verdict {
    let n: usize = 4;
    let t: Vec<Vec<Vec<Outcome>>> = (0..n)
        .map(|s| {
            if s + 1 == n {
                Vec::new()
            } else {
                vec![
                    vec![Outcome::certain(s.saturating_sub(1), -0.1)],
                    vec![Outcome::certain(s + 1, if s + 2 == n { 1.0 } else { 0.0 })],
                ]
            }
        })
        .collect();
    let mut env = FiniteMdp::new(t, 0).unwrap();
    let mut ql = tabular(AgentKind::Ql, &env, 3);
    let mut env_rng = rng(4);
    let mut s = env.reset(&mut env_rng);
    for _ in 0..50_000 {
        let a = ql.act(&s, env.num_actions(&s)).unwrap();
        let step = env.step(a, &mut env_rng).unwrap();
        let next = (!step.done).then_some((&step.next, env.num_actions(&step.next)));
        ql.learn(&s, a, step.reward, next).unwrap();
        s = if step.done { env.reset(&mut env_rng) } else { step.next };
    }
    let optimum = chain_optimum(n, 0.95);
    let mut worst: f64 = 0.0;
    for (s, best) in optimum.iter().enumerate() {
        for (q, q_star) in ql.tables().combined_row(s).iter().zip(best) {
            worst = worst.max((q - q_star).abs());
        }
    }
    verdict(worst <= 1e-3, format!("max |Q - Q*| = {worst:.2e} after 50000 updates"))
}

fn criterion_3() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut r = rng(MASTER_SEED);
    for id in [1, 2] {
        let scheme = IgtScheme::standard(id).unwrap();
        let means: Vec<f64> = Deck::ALL
            .iter()
            .map(|&d| (0..1_000_000).map(|_| scheme.draw(d, &mut r).combined()).sum::<f64>() / 1e6)
            .collect();
        for (m, ev) in means.iter().zip([-25.0, -25.0, 25.0, 25.0]) {
            pass &= (m - ev).abs() <= 0.5;
        }
        parts.push(format!(
            "scheme {id}: {}",
            means.iter().map(|m| format!("{m:.2}")).collect::<Vec<_>>().join(" ")
        ));
    }
    verdict(pass, parts.join("; "))
}

/// `summary.csv` keyed by (condition, agent).
struct Summary(BTreeMap<(String, String), Vec<String>>);

impl Summary {
    fn load(dir: &Path) -> Summary {
        let text = fs::read_to_string(dir.join("summary.csv")).unwrap();
        let mut lines = text.lines().skip(1);
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(header[0], "condition");
        Summary(
            lines
                .map(|l| {
                    let f: Vec<String> = l.split(',').map(str::to_string).collect();
                    ((f[0].clone(), f[1].clone()), f)
                })
                .collect(),
        )
    }

    fn field(&self, condition: &str, agent: &str, column: usize) -> f64 {
        self.0[&(condition.to_string(), agent.to_string())][column]
            .parse()
            .unwrap()
    }

    fn mean(&self, condition: &str, agent: &str) -> f64 {
        self.field(condition, agent, 3)
    }

    fn avg_wins(&self, condition: &str, agent: &str) -> f64 {
        self.field(condition, agent, 5)
    }

    fn avg_ranking(&self, condition: &str, agent: &str) -> f64 {
        self.field(condition, agent, 6)
    }

    fn avg_wins_pool(&self, condition: &str, agent: &str) -> f64 {
        self.field(condition, agent, 7)
    }

    fn agents(&self, condition: &str) -> Vec<String> {
        self.0
            .keys()
            .filter(|(c, _)| c == condition)
            .map(|(_, a)| a.clone())
            .collect()
    }
}

fn matrix_cell(dir: &Path, row: &str, col: &str) -> u32 {
    let text = fs::read_to_string(dir.join("matrix.csv")).unwrap();
    let mut lines = text.lines().skip(1);
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let j = header.iter().position(|h| *h == col).unwrap();
    let line = lines.find(|l| l.split(',').next() == Some(row)).unwrap();
    line.split(',').nth(j).unwrap().parse().unwrap()
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_config(name: &str, out: &Path) -> Duration {
    let cfg = parse_config(&configs_dir().join(format!("{name}.toml")), None, false).unwrap();
    let start = Instant::now();
    run_experiment(&cfg, out, RunOptions::default()).unwrap();
    start.elapsed()
}

fn relative_error(x: f64, target: f64) -> f64 {
    (x - target).abs() / target
}

fn criterion_4(s1: &Summary, s2: &Summary) -> Verdict {
    let (cp1, pd1) = (s1.mean("scheme1", "CP"), s1.mean("scheme1", "PD"));
    let (cp2, pd2) = (s2.mean("scheme2", "CP"), s2.mean("scheme2", "PD"));
    let best = s1
        .agents("scheme1")
        .into_iter()
        .max_by(|a, b| s1.mean("scheme1", a).total_cmp(&s1.mean("scheme1", b)))
        .unwrap();
    let checks = [
        relative_error(cp1, 1145.59) <= 0.15,
        relative_error(pd1, 1123.59) <= 0.15,
        best == "CP",
        relative_error(pd2, 1129.30) <= 0.15,
        relative_error(cp2, 1127.66) <= 0.15,
    ];
    verdict(
        checks.iter().all(|&c| c),
        format!(
            "scheme 1: CP {cp1:.2} (target 1145.59), PD {pd1:.2} (target 1123.59), best {best} (QL {:.2}, DQL {:.2}); \
             scheme 2: PD {pd2:.2} (target 1129.30), CP {cp2:.2} (target 1127.66)",
            s1.mean("scheme1", "QL"),
            s1.mean("scheme1", "DQL"),
        ),
    )
}

fn criterion_5(dir: &Path) -> Verdict {
    let s = Summary::load(dir);
    let ql_over_nql = matrix_cell(dir, "QL", "NQL");
    let nql_over_ql = matrix_cell(dir, "NQL", "QL");
    let (nql, pql) = (s.avg_wins("mdp", "NQL"), s.avg_wins("mdp", "PQL"));
    let worst = s
        .agents("mdp")
        .into_iter()
        .max_by(|a, b| s.avg_ranking("mdp", a).total_cmp(&s.avg_ranking("mdp", b)))
        .unwrap();
    let checks = [ql_over_nql >= 80, nql <= 30.0, pql <= 50.0, worst == "NQL"];
    verdict(
        checks.iter().all(|&c| c),
        format!(
            "QL:NQL {ql_over_nql}:{nql_over_ql} (need >= 80), NQL avg wins {nql:.2}% (<= 30), \
             PQL avg wins {pql:.2}% (<= 50), worst avg ranking {worst} {:.2} (NQL {:.2})",
            s.avg_ranking("mdp", &worst),
            s.avg_ranking("mdp", "NQL"),
        ),
    )
}

fn criterion_6(dir: &Path) -> Verdict {
    let s = Summary::load(dir);
    let (ad, adhd) = (s.avg_wins_pool("mdp", "AD"), s.avg_wins_pool("mdp", "ADHD"));
    verdict(
        ad <= 25.0 && adhd >= ad,
        format!("against {{QL, DQL, SARSA, SQL}}: AD {ad:.2}% (<= 25), ADHD {adhd:.2}% (>= AD)"),
    )
}

fn criterion_7(dir: &Path) -> Verdict {
    let s = Summary::load(dir);
    let mut pass = true;
    let mut parts = Vec::new();
    for mode in NonstationarityMode::ALL {
        let m = mode.name();
        let (sql, ql, dql) = (s.mean(m, "SQL"), s.mean(m, "QL"), s.mean(m, "DQL"));
        pass &= sql >= ql && sql >= dql;
        parts.push(format!("{m}: SQL {sql:.2} QL {ql:.2} DQL {dql:.2}"));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_8() -> Verdict {
    use NonstationarityMode::*;
    let r = RewardPair { pos: 3.0, neg: -2.0 };
    let on = |pos, neg| ActiveEvents { pos, neg };
    let cases = [
        (Muting, on(false, false), (3.0, -2.0)),
        (Muting, on(true, false), (0.0, -2.0)),
        (Muting, on(false, true), (3.0, 0.0)),
        (Muting, on(true, true), (0.0, 0.0)),
        (Scaling, on(false, false), (3.0, -2.0)),
        (Scaling, on(true, false), (300.0, -2.0)),
        (Scaling, on(false, true), (3.0, -200.0)),
        (Scaling, on(true, true), (300.0, -200.0)),
        (Flipping, on(false, false), (3.0, -2.0)),
        (Flipping, on(true, false), (0.0, -5.0)),
        (Flipping, on(false, true), (5.0, 0.0)),
        (Flipping, on(true, true), (2.0, -3.0)),
    ];
    let failures: Vec<String> = cases
        .iter()
        .filter(|(mode, events, (p, n))| {
            let got = transform(*mode, *events, r);
            got.pos != *p || got.neg != *n
        })
        .map(|(mode, events, _)| format!("{mode:?} {events:?}"))
        .collect();
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} cases exact", cases.len())
        } else {
            format!("mismatch: {}", failures.join(", "))
        },
    )
}

fn criterion_9(first: &Path, second: &Path, names: &[&str]) -> Verdict {
    let mut compared = 0;
    for name in names {
        let out = second.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_splitq"))
            .args([
                "run",
                configs_dir().join(format!("{name}.toml")).to_str().unwrap(),
                "--out",
            ])
            .arg(&out)
            .output()
            .unwrap();
        if !status.status.success() {
            return verdict(false, format!("{name}: rerun failed"));
        }
        let mut files: Vec<_> = fs::read_dir(first.join(name))
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        files.sort();
        let mut rerun: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
        rerun.sort();
        if files != rerun {
            return verdict(false, format!("{name}: different file sets"));
        }
        for f in files {
            if fs::read(first.join(name).join(&f)).unwrap() != fs::read(out.join(&f)).unwrap() {
                return verdict(false, format!("{name}/{}: bytes differ", f.to_string_lossy()));
            }
            compared += 1;
        }
    }
    verdict(
        true,
        format!("{compared} files identical across {} reruns", names.len()),
    )
}

fn criterion_10() -> Verdict {
    let pql = AgentParams::with_biases(1.0, 1.0, 0.0, 0.0);
    let nql = AgentParams::with_biases(0.0, 0.0, 1.0, 1.0);
    let mut r = rng(10);
    for case in 0..1_000 {
        let mut tp = QTables::new(&[3, 2, 4, 0]);
        let mut tn = tp.clone();
        for _ in 0..r.random_range(1..200) {
            let s = r.random_range(0..3);
            let a = r.random_range(0..[3, 2, 4][s]);
            let reward = RewardPair::new(r.random_range(0.0..100.0), -r.random_range(0.0..100.0)).unwrap();
            let next = r.random_range(0..4);
            let next = (next < 3).then_some(next);
            let alpha = r.random_range(0.0..=1.0);
            sql_update(&mut tp, &pql, s, a, reward, next, alpha).unwrap();
            sql_update(&mut tn, &nql, s, a, reward, next, alpha).unwrap();
        }
        if tp.negative.iter().any(|&v| v != 0.0) || tn.positive.iter().any(|&v| v != 0.0) {
            return verdict(false, format!("sequence {case} moved a zeroed table"));
        }
    }
    verdict(true, "1000 sequences, zeroed tables exactly 0")
}

fn report(results: &mut Vec<bool>, n: usize, v: Verdict, elapsed: Duration) {
    let status = if v.pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {n:>2}: {status} [{:.1}s] {}",
        elapsed.as_secs_f64(),
        v.detail
    );
    results.push(v.pass);
}

fn timed(f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let tmp = tempfile::tempdir().unwrap();
    let (first, second) = (tmp.path().join("first"), tmp.path().join("second"));
    let mut results = Vec::new();
    let secs = Duration::from_secs;

    let (v, t) = timed(criterion_1);
    report(&mut results, 1, within_budget(v, t, secs(1)), t);
    let (v, t) = timed(criterion_2);
    report(&mut results, 2, within_budget(v, t, secs(5)), t);
    let (v, t) = timed(criterion_3);
    report(&mut results, 3, within_budget(v, t, secs(10)), t);

    let t =
        run_config("igt_scheme1", &first.join("igt_scheme1")) + run_config("igt_scheme2", &first.join("igt_scheme2"));
    let v = criterion_4(
        &Summary::load(&first.join("igt_scheme1")),
        &Summary::load(&first.join("igt_scheme2")),
    );
    report(&mut results, 4, within_budget(v, t, secs(300)), t);

    let t = run_config("mdp_standard", &first.join("mdp_standard"));
    let v = criterion_5(&first.join("mdp_standard"));
    report(&mut results, 5, within_budget(v, t, secs(600)), t);

    let t = run_config("mdp_mental", &first.join("mdp_mental"));
    let v = criterion_6(&first.join("mdp_mental"));
    report(&mut results, 6, within_budget(v, t, secs(600)), t);

    let t = run_config("pacman", &first.join("pacman"));
    let v = criterion_7(&first.join("pacman"));
    report(&mut results, 7, within_budget(v, t, secs(900)), t);

    let (v, t) = timed(criterion_8);
    report(&mut results, 8, v, t);

    let names = ["igt_scheme1", "igt_scheme2", "mdp_standard", "mdp_mental", "pacman"];
    let (v, t) = timed(|| criterion_9(&first, &second, &names));
    report(&mut results, 9, v, t);

    let (v, t) = timed(criterion_10);
    report(&mut results, 10, v, t);

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
