//! Experiment drivers behind the `solve`, `compare` and `verify` subcommands.
//!
//! CSV schemas (stable):
//! - `summary.csv`: one [`MetricsRow`] per (problem, mode).
//! - `<problem>-<mode>-trace.csv`: one [`TraceRow`] per augmentation step.
//! - `<problem>-sd-objective.csv`, `<problem>-simplex-objective.csv`: `time,objective` pairs.
//! - `verify.csv`: one [`VerifyRow`] per (instance, check).

use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::augment::{
    oracle_checks, run_steepest_descent, verify_trace, AugmentOptions, Check, Trace, TraceStatus, VerifyReport,
};
use crate::error::{Error, Result};
use crate::instances::{self, RandomPolytopeSpec};
use crate::lp::{GeneralFormLP, Tolerances};
use crate::mps;
use crate::oracle::{rational, CircuitOracle};
use crate::par::{self, Execution};
use crate::simplex::{phase1_feasible_point, primal_solve, to_computational_form, SimplexOptions, SimplexStatus};
use crate::steepest::SolveMode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

/// Relative objective agreement required between the two competitors.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub problems: Vec<PathBuf>,
    pub mode: SolveMode,
    pub tol: Tolerances,
    pub max_iters: Option<usize>,
    pub reduce_parallel_facets: bool,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
    /// Random polytopes added to a `verify` run.
    pub random_instances: usize,
    /// Negate the objective after reading (MPS files are minimization problems).
    pub maximize: bool,
    pub exec: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problems: Vec::new(),
            mode: SolveMode::DualWarm,
            tol: Tolerances::default(),
            max_iters: None,
            reduce_parallel_facets: false,
            out_dir: None,
            seed: 0,
            random_instances: 0,
            maximize: false,
            exec: Execution::Parallel,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.tol.validate()?;
        if self.max_iters == Some(0) {
            return Err(Error::InvalidProblem("--max-iters must be positive".into()));
        }
        Ok(())
    }

    pub fn augment_options(&self) -> AugmentOptions {
        AugmentOptions {
            mode: self.mode,
            tol: self.tol,
            max_iters: self.max_iters,
            reduce_parallel_facets: self.reduce_parallel_facets,
            simplex: SimplexOptions {
                tol_feas: self.tol.feas,
                ..SimplexOptions::default()
            },
        }
    }
}

/// A loaded problem and the label used for output files.
#[derive(Clone, Debug)]
pub struct Problem {
    pub label: String,
    pub lp: GeneralFormLP,
}

pub fn load(path: &Path, maximize: bool) -> Result<Problem> {
    let lp = mps::load_problem(path)?;
    let lp = if maximize { lp.negated_objective() } else { lp };
    let label = path
        .file_stem()
        .map_or_else(|| lp.name().to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Problem { label, lp })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub problem: String,
    pub mode: String,
    pub status: String,
    pub n_iters: usize,
    pub total_s: f64,
    pub first_step_s: f64,
    pub first_step_phase1_s: f64,
    pub first_step_phase2_s: f64,
    pub mean_step_s: f64,
    pub median_step_s: f64,
    pub subproblem_pivots: usize,
    pub final_objective: Option<f64>,
    pub competitor_status: Option<String>,
    pub competitor_total_s: Option<f64>,
    pub competitor_iters: Option<usize>,
    pub competitor_objective: Option<f64>,
    pub objectives_agree: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub time: f64,
    pub objective: f64,
    pub steepness: f64,
    pub alpha: f64,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub time: f64,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub instance: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a command produced; the CLI prints `lines` and exits with `exit_code`.
#[derive(Clone, Debug, Default)]
pub struct CommandReport {
    pub rows: Vec<MetricsRow>,
    pub traces: Vec<Trace>,
    pub verify: Vec<VerifyRow>,
    pub lines: Vec<String>,
    pub exit_code: i32,
}

impl CommandReport {
    fn flag(&mut self, code: i32) {
        self.exit_code = self.exit_code.max(code);
    }
}

pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::Infeasible => EXIT_INFEASIBLE,
        Error::Unbounded { .. } | Error::OriginalUnboundedInLineality { .. } => EXIT_UNBOUNDED,
        Error::Numerical(_) | Error::InfeasiblePoint { .. } => EXIT_NUMERICAL,
        _ => 1,
    }
}

pub fn exit_code_for_trace(status: TraceStatus) -> i32 {
    match status {
        TraceStatus::Optimal => EXIT_OK,
        TraceStatus::Unbounded => EXIT_UNBOUNDED,
        TraceStatus::IterationLimit | TraceStatus::NumericalStall => EXIT_NUMERICAL,
    }
}

fn error_status(e: &Error) -> &'static str {
    match e {
        Error::Infeasible => "infeasible",
        Error::Unbounded { .. } | Error::OriginalUnboundedInLineality { .. } => "unbounded",
        _ => "numerical",
    }
}

fn safe(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn trace_rows(trace: &Trace) -> Vec<TraceRow> {
    trace
        .steps
        .iter()
        .zip(&trace.solves)
        .map(|(s, solve)| TraceRow {
            iteration: s.iteration,
            time: s.elapsed,
            objective: s.objective,
            steepness: s.steepness,
            alpha: s.alpha,
            pivots: solve.pivots,
        })
        .collect()
}

fn metrics(label: &str, trace: &Trace) -> MetricsRow {
    let first = trace.first_step();
    MetricsRow {
        problem: label.to_string(),
        mode: trace.mode.to_string(),
        status: trace.status.as_str().to_string(),
        n_iters: trace.n_iters(),
        total_s: trace.total_seconds,
        first_step_s: first.map_or(0.0, |f| f.seconds),
        first_step_phase1_s: first.map_or(0.0, |f| f.phase1_seconds),
        first_step_phase2_s: first.map_or(0.0, |f| f.phase2_seconds),
        mean_step_s: trace.mean_step_seconds(),
        median_step_s: trace.median_step_seconds(),
        subproblem_pivots: trace.total_pivots(),
        final_objective: Some(trace.final_objective()),
        ..MetricsRow::default()
    }
}

fn failed_row(label: &str, mode: SolveMode, e: &Error) -> MetricsRow {
    MetricsRow {
        problem: label.to_string(),
        mode: mode.to_string(),
        status: error_status(e).to_string(),
        ..MetricsRow::default()
    }
}

/// Phase I, then the augmentation scheme, on one problem.
pub fn solve_problem(problem: &Problem, cfg: &RunConfig) -> Result<Trace> {
    let opts = cfg.augment_options();
    let (x0, _, _) = phase1_feasible_point(&problem.lp, &opts.simplex)?;
    run_steepest_descent(&problem.lp, &x0, &opts)
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<CommandReport> {
    cfg.validate()?;
    let mut report = CommandReport::default();
    for path in &cfg.problems {
        let problem = load(path, cfg.maximize)?;
        info!(
            "solving {} ({} vars, {} eq, {} ineq)",
            problem.label,
            problem.lp.n(),
            problem.lp.m_eq(),
            problem.lp.m_ineq()
        );
        match solve_problem(&problem, cfg) {
            Ok(trace) => {
                let row = metrics(&problem.label, &trace);
                report.lines.push(format!(
                    "{} {} status={} objective={:.12e} iterations={} total={:.3}s",
                    problem.label,
                    cfg.mode,
                    row.status,
                    trace.final_objective(),
                    row.n_iters,
                    row.total_s
                ));
                report.flag(exit_code_for_trace(trace.status));
                if let Some(dir) = &cfg.out_dir {
                    write_csv(
                        &dir.join(format!("{}-{}-trace.csv", safe(&problem.label), cfg.mode)),
                        &trace_rows(&trace),
                    )?;
                }
                report.rows.push(row);
                report.traces.push(trace);
            }
            Err(e) => {
                report.lines.push(format!(
                    "{} {} status={} reason=\"{e}\"",
                    problem.label,
                    cfg.mode,
                    error_status(&e)
                ));
                report.flag(exit_code_for_error(&e));
                report.rows.push(failed_row(&problem.label, cfg.mode, &e));
            }
        }
    }
    if let Some(dir) = &cfg.out_dir {
        write_csv(&dir.join("summary.csv"), &report.rows)?;
    }
    Ok(report)
}

fn agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= AGREEMENT_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Steepest descent and primal simplex Phase II from the same Phase I point.
pub fn compare_problem(problem: &Problem, cfg: &RunConfig) -> Result<(MetricsRow, Trace, Vec<SeriesRow>)> {
    let opts = cfg.augment_options();
    let (x0, basis, _) = phase1_feasible_point(&problem.lp, &opts.simplex)?;
    let trace = run_steepest_descent(&problem.lp, &x0, &opts)?;
    let (std, _) = to_computational_form(&problem.lp);
    let simplex_opts = SimplexOptions {
        record_trace: true,
        ..opts.simplex.clone()
    };
    let started = Instant::now();
    let res = primal_solve(&std, Some(&basis), &simplex_opts);
    let seconds = started.elapsed().as_secs_f64();
    let mut row = metrics(&problem.label, &trace);
    let status = match res.status {
        SimplexStatus::Optimal => "optimal",
        SimplexStatus::PrimalInfeasible => "infeasible",
        SimplexStatus::Unbounded => "unbounded",
        SimplexStatus::IterationLimit => "iteration-limit",
        SimplexStatus::NumericalFailure => "numerical",
    };
    row.competitor_status = Some(status.to_string());
    row.competitor_total_s = Some(seconds);
    row.competitor_iters = Some(res.iterations());
    row.competitor_objective = Some(res.objective);
    let both_optimal = trace.status == TraceStatus::Optimal && res.status == SimplexStatus::Optimal;
    row.objectives_agree = Some(both_optimal && agree(trace.final_objective(), res.objective));
    let mut series = vec![SeriesRow {
        time: 0.0,
        objective: trace.initial_objective,
    }];
    series.extend(res.trace.iter().map(|p| SeriesRow {
        time: p.seconds,
        objective: p.objective,
    }));
    Ok((row, trace, series))
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<CommandReport> {
    cfg.validate()?;
    let mut report = CommandReport::default();
    for path in &cfg.problems {
        let problem = load(path, cfg.maximize)?;
        match compare_problem(&problem, cfg) {
            Ok((row, trace, series)) => {
                let agree = row.objectives_agree == Some(true);
                report.lines.push(format!(
                    "{} sd[{}] status={} objective={:.12e} iterations={} total={:.3}s | simplex status={} objective={:.12e} iterations={} total={:.3}s | {}",
                    problem.label,
                    cfg.mode,
                    row.status,
                    trace.final_objective(),
                    row.n_iters,
                    row.total_s,
                    row.competitor_status.as_deref().unwrap_or("-"),
                    row.competitor_objective.unwrap_or(f64::NAN),
                    row.competitor_iters.unwrap_or(0),
                    row.competitor_total_s.unwrap_or(0.0),
                    if agree { "agree" } else { "DISAGREE" }
                ));
                report.flag(exit_code_for_trace(trace.status));
                if !agree && trace.status == TraceStatus::Optimal {
                    warn!("{}: competitors disagree", problem.label);
                    report.flag(EXIT_INVARIANT);
                }
                if let Some(dir) = &cfg.out_dir {
                    let base = safe(&problem.label);
                    write_csv(&dir.join(format!("{base}-{}-trace.csv", cfg.mode)), &trace_rows(&trace))?;
                    let sd: Vec<SeriesRow> = trace
                        .objective_series()
                        .into_iter()
                        .map(|(time, objective)| SeriesRow { time, objective })
                        .collect();
                    write_csv(&dir.join(format!("{base}-sd-objective.csv")), &sd)?;
                    write_csv(&dir.join(format!("{base}-simplex-objective.csv")), &series)?;
                }
                report.rows.push(row);
                report.traces.push(trace);
            }
            Err(e) => {
                report
                    .lines
                    .push(format!("{} status={} reason=\"{e}\"", problem.label, error_status(&e)));
                report.flag(exit_code_for_error(&e));
                report.rows.push(failed_row(&problem.label, cfg.mode, &e));
            }
        }
    }
    if let Some(dir) = &cfg.out_dir {
        write_csv(&dir.join("summary.csv"), &report.rows)?;
    }
    Ok(report)
}

/// The full oracle suite on one instance.
pub fn verify_problem(problem: &Problem, cfg: &RunConfig) -> Result<VerifyReport> {
    let oracle = CircuitOracle::new(&problem.lp, Execution::Sequential)?;
    let trace = solve_problem(problem, cfg)?;
    let mut report = verify_trace(&problem.lp, &trace, Some(&oracle));
    report.extend(oracle_checks(&trace, &oracle));
    let optimum = oracle.brute_force_optimum();
    let check = match (&optimum, trace.status) {
        (Ok(opt), TraceStatus::Optimal) => {
            let exact = rational::to_f64(&opt.objective);
            Check {
                name: "optimum".into(),
                passed: agree(exact, trace.final_objective()),
                detail: format!(
                    "{:.12e} vs vertex enumeration {}",
                    trace.final_objective(),
                    opt.objective
                ),
            }
        }
        (Err(Error::Unbounded { .. }), TraceStatus::Unbounded) => Check {
            name: "optimum".into(),
            passed: true,
            detail: "unbounded".into(),
        },
        (o, s) => Check {
            name: "optimum".into(),
            passed: false,
            detail: format!("trace {s:?}, oracle {:?}", o.as_ref().map(|v| v.objective.to_string())),
        },
    };
    report.checks.push(check);
    if let Some(first) = trace.solves.first() {
        let ties = oracle.steepest_at(&first.active.rows);
        let shown: Vec<String> = ties.argmin.iter().map(|c| format!("{:?}", c.g)).collect();
        report.checks.push(Check {
            name: "tie-set".into(),
            passed: true,
            detail: format!(
                "{} steepest circuits at x0 (ratio {}): {}",
                ties.argmin.len(),
                ties.min_ratio.map(|r| r.to_string()).unwrap_or_else(|| "-".into()),
                shown.join(" ")
            ),
        });
    }
    Ok(report)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<CommandReport> {
    cfg.validate()?;
    let mut problems = cfg
        .problems
        .iter()
        .map(|p| load(p, cfg.maximize))
        .collect::<Result<Vec<_>>>()?;
    for k in 0..cfg.random_instances as u64 {
        let seed = cfg.seed.wrapping_add(k);
        problems.push(Problem {
            label: format!("random-{seed}"),
            lp: instances::random_polytope(seed, RandomPolytopeSpec::default()),
        });
    }
    let results = par::map(cfg.exec, &problems, |p| verify_problem(p, cfg));
    let mut report = CommandReport::default();
    for (problem, result) in problems.iter().zip(results) {
        match result {
            Ok(r) => {
                for c in &r.checks {
                    report.lines.push(format!(
                        "{} {} {} {}",
                        problem.label,
                        c.name,
                        if c.passed { "PASS" } else { "FAIL" },
                        c.detail
                    ));
                    report.verify.push(VerifyRow {
                        instance: problem.label.clone(),
                        check: c.name.clone(),
                        passed: c.passed,
                        detail: c.detail.clone(),
                    });
                }
                if !r.passed() {
                    report.flag(EXIT_INVARIANT);
                }
            }
            Err(e) => {
                report.lines.push(format!("{} run FAIL {e}", problem.label));
                report.verify.push(VerifyRow {
                    instance: problem.label.clone(),
                    check: "run".into(),
                    passed: false,
                    detail: e.to_string(),
                });
                report.flag(match e {
                    Error::OracleLimit(_) => EXIT_INVARIANT,
                    ref other => exit_code_for_error(other).max(EXIT_INVARIANT),
                });
            }
        }
    }
    if let Some(dir) = &cfg.out_dir {
        write_csv(&dir.join("verify.csv"), &report.verify)?;
    }
    Ok(report)
}
