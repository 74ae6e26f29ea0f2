//! Acceptance suite. Each test prints exactly one `[criterion N] PASS|FAIL ...` line to stderr
//! (written directly, so it shows up even when libtest captures output) and then asserts.
//!
//! Tests share one lock so the timing criteria never overlap with other work.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use num_traits::Zero;
use sdaug::augment::{
    conformal_ratios_equal, oracle_checks, run_steepest_descent, verify_trace, AugmentOptions, Trace, TraceStatus,
};
use sdaug::harness::{self, Problem, RunConfig};
use sdaug::instances::{self, RandomPolytopeSpec};
use sdaug::oracle::{rational::Q, CircuitOracle};
use sdaug::par::Execution;
use sdaug::simplex::{phase1_feasible_point, SimplexOptions};
use sdaug::steepest::{build_steepest, SolveMode};
use sdaug::{GeneralFormLP, Point, Tolerances};

// Pinned tolerances and budgets.
const STEEPNESS_TOL: f64 = 1e-9;
const OBJECTIVE_REL_TOL: f64 = 1e-6;
const DIRECTION_TOL: f64 = 1e-7;
const ORACLE_BUDGET: Duration = Duration::from_secs(120);
const NETLIB_BUDGET: Duration = Duration::from_secs(300);
const RANDOM_INSTANCES: u64 = 50;
const LONG_RUN: usize = 50;
const TIMING_REPEATS: usize = 3;
const NETLIB: [&str; 5] = ["afiro", "adlittle", "sc50a", "sc50b", "share2b"];

static LOCK: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(id: u32, name: &str, passed: bool, detail: &str) {
    let line = format!(
        "[criterion {id}] {} {name}: {detail}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(passed, "criterion {id} ({name}) failed: {detail}");
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn solve(lp: &GeneralFormLP, mode: SolveMode, reduce: bool) -> sdaug::Result<Trace> {
    let opts = AugmentOptions {
        mode,
        reduce_parallel_facets: reduce,
        ..AugmentOptions::default()
    };
    let (x0, _, _) = phase1_feasible_point(lp, &opts.simplex)?;
    run_steepest_descent(lp, &x0, &opts)
}

struct OracleRun {
    label: String,
    oracle: CircuitOracle,
    lp: GeneralFormLP,
    traces: Vec<Trace>,
}

/// Oracle-scale instances, solved in every mode. Built once; the build time is criterion 1's runtime.
fn oracle_runs() -> &'static (Vec<OracleRun>, Duration) {
    static RUNS: OnceLock<(Vec<OracleRun>, Duration)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let started = Instant::now();
        let mut problems = vec![
            ("triangle".to_string(), instances::triangle()),
            ("cube3".to_string(), instances::cube(3)),
            ("pyramid".to_string(), instances::pyramid()),
        ];
        for seed in 0..RANDOM_INSTANCES {
            problems.push((
                format!("random-{seed}"),
                instances::random_polytope(seed, RandomPolytopeSpec::default()),
            ));
        }
        let runs = problems
            .into_iter()
            .map(|(label, lp)| {
                let oracle = CircuitOracle::new(&lp, Execution::Parallel).expect("oracle-scale instance");
                let traces = SolveMode::ALL
                    .iter()
                    .map(|&m| solve(&lp, m, false).expect("solve"))
                    .collect();
                OracleRun {
                    label,
                    oracle,
                    lp,
                    traces,
                }
            })
            .collect();
        (runs, started.elapsed())
    })
}

struct MediumRun {
    label: String,
    lp: GeneralFormLP,
    /// Indexed like `SolveMode::ALL`.
    traces: Vec<Trace>,
}

fn medium_problems() -> Vec<(String, GeneralFormLP)> {
    let afiro = harness::load(&fixture("netlib/afiro.mps"), false).expect("afiro fixture");
    let mut v = vec![(afiro.label, afiro.lp)];
    for (seed, n, m) in [(1, 30, 20), (2, 60, 40), (3, 80, 50), (4, 100, 60)] {
        v.push((format!("packing-{seed}"), instances::random_packing(seed, n, m)));
    }
    for (seed, s, t) in [(1, 8, 8), (2, 12, 12), (3, 15, 15)] {
        v.push((
            format!("transport-{seed}"),
            instances::random_transportation(seed, s, t),
        ));
    }
    v
}

/// Larger problems in every mode; shared by the timing and trace criteria.
fn medium_runs() -> &'static Vec<MediumRun> {
    static RUNS: OnceLock<Vec<MediumRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        medium_problems()
            .into_iter()
            .map(|(label, lp)| {
                let traces = SolveMode::ALL
                    .iter()
                    .map(|&m| solve(&lp, m, false).expect("solve"))
                    .collect();
                MediumRun { label, lp, traces }
            })
            .collect()
    })
}

#[test]
fn criterion_1_oracle_steepness_agreement() {
    let _g = serial();
    let (runs, elapsed) = oracle_runs();
    let mut solves = 0;
    let mut failures = Vec::new();
    for run in runs {
        for t in &run.traces {
            solves += t.solves.len();
            let report = oracle_checks(t, &run.oracle);
            let check = report.get("oracle-steepness").expect("check present");
            if !check.passed {
                failures.push(format!("{} {}: {}", run.label, t.mode, check.detail));
            }
        }
    }
    let within = *elapsed < ORACLE_BUDGET;
    let detail = format!(
        "{} instances x {} modes, {solves} subproblem solves, {} disagreements beyond {STEEPNESS_TOL:e}, {:.1}s (budget {}s){}",
        runs.len(),
        SolveMode::ALL.len(),
        failures.len(),
        elapsed.as_secs_f64(),
        ORACLE_BUDGET.as_secs(),
        failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
    );
    verdict(1, "oracle steepness agreement", failures.is_empty() && within, &detail);
}

fn netlib_path(name: &str) -> Option<PathBuf> {
    let mut dirs = vec![fixture("netlib")];
    if let Some(d) = std::env::var_os("NETLIB_DIR") {
        dirs.push(PathBuf::from(d));
    }
    dirs.iter()
        .flat_map(|d| {
            [
                d.join(format!("{name}.mps")),
                d.join(format!("{}.mps", name.to_uppercase())),
                d.join(name),
            ]
        })
        .find(|p| p.is_file())
}

#[test]
fn criterion_2_netlib_optima() {
    let _g = serial();
    let started = Instant::now();
    let cfg = RunConfig::default();
    let mut missing = Vec::new();
    let mut bad = Vec::new();
    let mut ok = Vec::new();
    for name in NETLIB {
        let Some(path) = netlib_path(name) else {
            missing.push(name);
            continue;
        };
        let problem = harness::load(&path, false).expect("parse netlib file");
        match harness::compare_problem(&problem, &cfg) {
            Ok((row, trace, _)) => {
                let simplex = row.competitor_objective.unwrap_or(f64::NAN);
                let sd = trace.final_objective();
                let rel = (sd - simplex).abs() / (1.0 + sd.abs().max(simplex.abs()));
                let good = trace.status == TraceStatus::Optimal
                    && row.competitor_status.as_deref() == Some("optimal")
                    && rel <= OBJECTIVE_REL_TOL;
                let msg = format!("{name} sd={sd:.10e} simplex={simplex:.10e} rel={rel:.1e}");
                if good {
                    ok.push(msg)
                } else {
                    bad.push(format!(
                        "{msg} sd-status={} simplex-status={:?}",
                        row.status, row.competitor_status
                    ));
                }
            }
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    let elapsed = started.elapsed();
    let passed = missing.is_empty() && bad.is_empty() && elapsed < NETLIB_BUDGET;
    let detail = format!(
        "agree [{}]; disagree [{}]; missing files [{}] (set NETLIB_DIR); {:.1}s",
        ok.join(", "),
        bad.join(", "),
        missing.join(", "),
        elapsed.as_secs_f64()
    );
    verdict(2, "netlib optima agree with simplex", passed, &detail);
}

#[test]
fn criterion_3_augmentation_invariants() {
    let _g = serial();
    const CHECKS: [&str; 4] = [
        "monotone-steepness",
        "orthant-change",
        "no-repeated-circuit",
        "iteration-bound",
    ];
    let mut traces = 0;
    let mut failures = Vec::new();
    let mut bounds = 0;
    let mut record = |label: &str, lp: &GeneralFormLP, t: &Trace, oracle: Option<&CircuitOracle>| {
        traces += 1;
        let report = verify_trace(lp, t, oracle);
        for name in CHECKS {
            match report.get(name) {
                Some(c) if !c.passed => failures.push(format!("{label} {} {name}: {}", t.mode, c.detail)),
                Some(_) if name == "iteration-bound" => bounds += 1,
                _ => {}
            }
        }
    };
    for run in &oracle_runs().0 {
        for t in &run.traces {
            record(&run.label, &run.lp, t, Some(&run.oracle));
        }
    }
    for run in medium_runs() {
        for t in &run.traces {
            record(&run.label, &run.lp, t, None);
        }
    }
    let detail = format!(
        "{traces} traces, {bounds} iteration bounds checked against the oracle, {} violations{}",
        failures.len(),
        failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
    );
    verdict(
        3,
        "monotonicity, orthant change, non-repetition, iteration bound",
        failures.is_empty(),
        &detail,
    );
}

#[test]
fn criterion_4_conformal_equal_steepness() {
    let _g = serial();
    let mut traced = 0;
    let mut constructed = 0;
    let mut failures = Vec::new();
    for run in &oracle_runs().0 {
        for t in &run.traces {
            let report = oracle_checks(t, &run.oracle);
            let c = report.get("conformal-equal-steepness").expect("check present");
            traced += t.steps.len();
            if !c.passed {
                failures.push(format!("{} {}: {}", run.label, t.mode, c.detail));
            }
        }
        // Non-vertex steepest directions: the sum of all tied steepest circuits at each visited point.
        for solve in &run.traces[0].solves {
            let ties = run.oracle.steepest_at(&solve.active.rows);
            let (Some(ratio), true) = (ties.min_ratio.clone(), ties.argmin.len() > 1) else {
                continue;
            };
            let mut y = vec![Q::zero(); run.oracle.n()];
            for g in &ties.argmin {
                for (acc, v) in y.iter_mut().zip(g.g_rational()) {
                    *acc += v;
                }
            }
            constructed += 1;
            match conformal_ratios_equal(&run.oracle, &y, &ratio) {
                Ok(true) => {}
                Ok(false) => failures.push(format!(
                    "{}: sum of {} ties has an unequal conformal circuit",
                    run.label,
                    ties.argmin.len()
                )),
                Err(e) => failures.push(format!("{}: {e}", run.label)),
            }
        }
    }
    let detail = format!(
        "{traced} traced directions and {constructed} constructed tie sums decomposed exactly, {} mismatches{}",
        failures.len(),
        failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
    );
    verdict(
        4,
        "conformal circuits share the direction's steepness",
        failures.is_empty() && constructed > 0,
        &detail,
    );
}

fn mode_index(mode: SolveMode) -> usize {
    SolveMode::ALL.iter().position(|&m| m == mode).unwrap()
}

#[test]
fn criterion_5_warm_start_beats_cold() {
    let _g = serial();
    let (warm, cold) = (mode_index(SolveMode::DualWarm), mode_index(SolveMode::DualCold));
    let mut long = Vec::new();
    let mut slower = Vec::new();
    for run in medium_runs() {
        if run.traces[warm].n_iters() < LONG_RUN {
            continue;
        }
        let (w, c) = (
            run.traces[warm].mean_step_seconds(),
            run.traces[cold].mean_step_seconds(),
        );
        let msg = format!(
            "{} ({} iters) {:.2}ms vs {:.2}ms, ratio {:.3}",
            run.label,
            run.traces[warm].n_iters(),
            w * 1e3,
            c * 1e3,
            w / c
        );
        if w >= c {
            slower.push(msg.clone());
        }
        long.push(msg);
    }
    let detail = format!(
        "{} problems with >= {LONG_RUN} iterations: {}",
        long.len(),
        long.join("; ")
    );
    verdict(
        5,
        "dual-warm mean step time < dual-cold",
        !long.is_empty() && slower.is_empty(),
        &detail,
    );
}

fn normalized(y: &[f64]) -> Vec<f64> {
    let s = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    y.iter().map(|v| v / s).collect()
}

#[test]
fn criterion_6_parallel_facet_reduction() {
    let _g = serial();
    let weighted_cube = |d: usize| {
        let lp = instances::cube(d);
        lp.with_objective((1..=d).map(|k| -(k as f64)).collect()).unwrap()
    };
    let problems: Vec<(String, GeneralFormLP)> = vec![
        ("box".into(), instances::box_lp()),
        ("box.mps".into(), harness::load(&fixture("box.mps"), false).unwrap().lp),
        ("cube3-weighted".into(), weighted_cube(3)),
        ("cube5-weighted".into(), weighted_cube(5)),
        ("packing-1".into(), instances::random_packing(1, 30, 20)),
        ("packing-5".into(), instances::random_packing(5, 40, 25)),
    ];
    let tol = Tolerances::default();
    let opts = SimplexOptions::default();
    let mut points = 0;
    let mut optimal = 0;
    let mut failures = Vec::new();
    for (label, lp) in &problems {
        let t = solve(lp, SolveMode::DualWarm, false).expect("solve");
        let (x0, _, _) = phase1_feasible_point(lp, &opts).unwrap();
        let xs = std::iter::once(x0.x.clone()).chain(t.steps.iter().map(|s| s.x.clone()));
        for (k, x) in xs.enumerate() {
            let p = Point::evaluate(lp, x).unwrap();
            let mut plain = build_steepest(lp, &p, &tol, false).unwrap();
            let mut reduced = build_steepest(lp, &p, &tol, true).unwrap();
            assert!(!reduced.reduction().is_empty(), "{label} has no negated pairs");
            let a = plain.solve_direction(lp, SolveMode::DualCold, &opts).unwrap();
            let b = reduced.solve_direction(lp, SolveMode::DualCold, &opts).unwrap();
            points += 1;
            // At an optimum neither model has a descent direction; the unreduced one may return
            // y+ = y- on an inactive row while the reduced one returns a non-improving direction.
            let (oa, ob) = (
                a.is_optimal_certificate(lp, tol.term),
                b.is_optimal_certificate(lp, tol.term),
            );
            if oa || ob {
                if oa != ob {
                    failures.push(format!(
                        "{label} point {k}: optimality certificates differ ({oa} vs {ob})"
                    ));
                }
                optimal += 1;
                continue;
            }
            match (a.direction.steepness, b.direction.steepness) {
                (Some(sa), Some(sb)) => {
                    if (sa - sb).abs() > STEEPNESS_TOL * (1.0 + sa.abs()) {
                        failures.push(format!("{label} point {k}: steepness {sa:.12e} vs {sb:.12e}"));
                    }
                    let (ya, yb) = (normalized(&a.direction.y), normalized(&b.direction.y));
                    let gap = ya.iter().zip(&yb).fold(0.0_f64, |m, (u, v)| m.max((u - v).abs()));
                    if gap > DIRECTION_TOL {
                        failures.push(format!("{label} point {k}: directions differ by {gap:.2e}"));
                    }
                }
                (sa, sb) => failures.push(format!("{label} point {k}: {sa:?} vs {sb:?}")),
            }
        }
    }
    let detail = format!(
        "{} fixtures, {points} points ({optimal} optimal on both), {} mismatches (steepness tol {STEEPNESS_TOL:e}, direction tol {DIRECTION_TOL:e}){}",
        problems.len(),
        failures.len(),
        failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
    );
    verdict(6, "reduced and unreduced models agree", failures.is_empty(), &detail);
}

/// Best-of-`TIMING_REPEATS` (all-steps mean, re-solve mean) per mode. Dual-cold is never close
/// to the warm modes and keeps its single sample.
fn step_means(run: &MediumRun) -> Vec<(f64, f64)> {
    SolveMode::ALL
        .iter()
        .zip(&run.traces)
        .map(|(&mode, t)| {
            let extra = if mode == SolveMode::DualCold { 0 } else { TIMING_REPEATS - 1 };
            let mut best = (t.mean_step_seconds(), t.mean_resolve_seconds());
            for _ in 0..extra {
                let again = solve(&run.lp, mode, false).expect("solve");
                best = (best.0.min(again.mean_step_seconds()), best.1.min(again.mean_resolve_seconds()));
            }
            best
        })
        .collect()
}

fn fastest(means: &[f64]) -> usize {
    (0..means.len()).min_by(|&a, &b| means[a].total_cmp(&means[b])).unwrap()
}

#[test]
fn criterion_7_dual_warm_fastest_on_majority() {
    let _g = serial();
    let warm = mode_index(SolveMode::DualWarm);
    // The first solve has no previous basis and is cold in every mode, so the ranking uses
    // re-solves; the all-steps ranking is reported alongside.
    let (mut wins, mut wins_all) = (0, 0);
    let mut rows = Vec::new();
    for run in medium_runs() {
        let means = step_means(run);
        let all: Vec<f64> = means.iter().map(|m| m.0).collect();
        let resolve: Vec<f64> = means.iter().map(|m| m.1).collect();
        let (best, best_all) = (fastest(&resolve), fastest(&all));
        wins += usize::from(best == warm);
        wins_all += usize::from(best_all == warm);
        rows.push(format!(
            "{} {} (re-solve ms: {})",
            run.label,
            SolveMode::ALL[best],
            resolve.iter().map(|v| format!("{:.2}", v * 1e3)).collect::<Vec<_>>().join("/")
        ));
    }
    let total = medium_runs().len();
    let detail = format!(
        "dual-warm has the lowest mean re-solve time on {wins}/{total} (lowest all-steps mean on {wins_all}/{total}); \
         dual-warm/dual-cold/primal-warm: {}",
        rows.join(", ")
    );
    verdict(7, "dual-warm fastest on the majority", 2 * wins > total, &detail);
}

#[test]
fn criterion_8_objective_traces() {
    let _g = serial();
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        problems: vec![fixture("netlib/afiro.mps"), fixture("box.mps"), fixture("pyramid.mps")],
        out_dir: Some(dir.path().to_path_buf()),
        ..RunConfig::default()
    };
    let report = harness::cmd_compare(&cfg).unwrap();
    let mut files_ok = true;
    for label in ["afiro", "box", "pyramid"] {
        for who in ["sd", "simplex"] {
            let text =
                std::fs::read_to_string(dir.path().join(format!("{label}-{who}-objective.csv"))).unwrap_or_default();
            files_ok &= text.starts_with("time,objective") && text.lines().count() >= 2;
        }
    }
    // Front-loaded progress, measured on runs long enough for 10% to mean something.
    let mut front_loaded = Vec::new();
    let mut checked = 0;
    let problems = medium_problems();
    let dual_warm = mode_index(SolveMode::DualWarm);
    for (run, (label, lp)) in medium_runs().iter().zip(&problems) {
        let trace = &run.traces[dual_warm];
        let n = trace.n_iters();
        if n < 10 {
            continue;
        }
        let (_, series_trace, _) = harness::compare_problem(
            &Problem {
                label: label.clone(),
                lp: lp.clone(),
            },
            &RunConfig::default(),
        )
        .unwrap();
        checked += 1;
        let k = series_trace.largest_decrease_step().unwrap();
        if k < n.div_ceil(10) {
            front_loaded.push(format!("{label} (step {} of {n})", k + 1));
        }
    }
    let detail = format!(
        "objective CSVs written for {} problems ({}); largest decrease within the first 10% on {}/{checked}: {}",
        report.rows.len(),
        if files_ok { "ok" } else { "missing or empty" },
        front_loaded.len(),
        front_loaded.join(", ")
    );
    verdict(
        8,
        "objective-vs-time traces",
        files_ok && !front_loaded.is_empty(),
        &detail,
    );
}
