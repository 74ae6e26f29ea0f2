//! Steepest-descent augmentation: solve for a steepest direction, take the maximal step,
//! flip the affected bounds, re-solve warm.

use std::time::Instant;

use log::{debug, warn};
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, check_feasible, ActiveSet, Direction, GeneralFormLP, Point, Tolerances};
use crate::oracle::{rational, CircuitOracle};
use crate::simplex::SimplexOptions;
use crate::steepest::{build_steepest, SolveMode};

/// Consecutive tiny steps tolerated before giving up.
const STALL_STEPS: usize = 3;
const STALL_ALPHA: f64 = 1e-12;
/// Relative width of the blocking-row tie window.
const BLOCKING_TIE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct AugmentOptions {
    pub mode: SolveMode,
    pub tol: Tolerances,
    /// `None` means `50 * (n + m_B)`.
    pub max_iters: Option<usize>,
    pub reduce_parallel_facets: bool,
    pub simplex: SimplexOptions,
}

impl Default for AugmentOptions {
    fn default() -> Self {
        AugmentOptions {
            mode: SolveMode::DualWarm,
            tol: Tolerances::default(),
            max_iters: None,
            reduce_parallel_facets: false,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStatus {
    Optimal,
    Unbounded,
    IterationLimit,
    NumericalStall,
}

impl TraceStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceStatus::Optimal => "optimal",
            TraceStatus::Unbounded => "unbounded",
            TraceStatus::IterationLimit => "iteration-limit",
            TraceStatus::NumericalStall => "numerical-stall",
        }
    }
}

/// One subproblem solve (there is one more solve than there are steps).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveRecord {
    pub seconds: f64,
    pub phase1_seconds: f64,
    pub phase2_seconds: f64,
    pub pivots: usize,
    pub warm: bool,
    pub subproblem_objective: f64,
    /// Active rows of the point the subproblem was built for.
    pub active: ActiveSet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepRecord {
    pub iteration: usize,
    pub direction: Direction,
    pub alpha: f64,
    pub blocking: Vec<usize>,
    /// `c.x` after the step.
    pub objective: f64,
    pub steepness: f64,
    /// `sign(B y)` per inequality row.
    pub orthant: Vec<i8>,
    /// Wall-clock seconds since the run started, taken after the step.
    pub elapsed: f64,
    /// The iterate after the step (after refinement).
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trace {
    pub problem: String,
    pub mode: SolveMode,
    pub status: TraceStatus,
    pub initial_objective: f64,
    pub steps: Vec<StepRecord>,
    pub solves: Vec<SolveRecord>,
    pub final_point: Point,
    pub unbounded_ray: Option<Vec<f64>>,
    pub total_seconds: f64,
}

impl Trace {
    pub fn n_iters(&self) -> usize {
        self.steps.len()
    }

    pub fn final_objective(&self) -> f64 {
        self.steps.last().map_or(self.initial_objective, |s| s.objective)
    }

    pub fn first_step(&self) -> Option<&SolveRecord> {
        self.solves.first()
    }

    pub fn mean_step_seconds(&self) -> f64 {
        if self.solves.is_empty() {
            return 0.0;
        }
        self.solves.iter().map(|s| s.seconds).sum::<f64>() / self.solves.len() as f64
    }

    pub fn median_step_seconds(&self) -> f64 {
        let mut t: Vec<f64> = self.solves.iter().map(|s| s.seconds).collect();
        if t.is_empty() {
            return 0.0;
        }
        t.sort_by(f64::total_cmp);
        let k = t.len();
        if k % 2 == 1 {
            t[k / 2]
        } else {
            0.5 * (t[k / 2 - 1] + t[k / 2])
        }
    }

    /// Mean subproblem time over solves after the first (the warm-started ones in warm modes).
    pub fn mean_resolve_seconds(&self) -> f64 {
        let rest = &self.solves[1.min(self.solves.len())..];
        if rest.is_empty() {
            return 0.0;
        }
        rest.iter().map(|s| s.seconds).sum::<f64>() / rest.len() as f64
    }

    pub fn total_pivots(&self) -> usize {
        self.solves.iter().map(|s| s.pivots).sum()
    }

    /// `(elapsed seconds, objective)` after each step, starting at `(0, c.x0)`.
    pub fn objective_series(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, self.initial_objective)];
        out.extend(self.steps.iter().map(|s| (s.elapsed, s.objective)));
        out
    }

    /// Index of the step with the largest objective decrease.
    pub fn largest_decrease_step(&self) -> Option<usize> {
        let mut prev = self.initial_objective;
        let mut best: Option<(usize, f64)> = None;
        for (k, s) in self.steps.iter().enumerate() {
            let dec = prev - s.objective;
            if best.is_none_or(|(_, b)| dec > b) {
                best = Some((k, dec));
            }
            prev = s.objective;
        }
        best.map(|(k, _)| k)
    }
}

fn sign(v: f64, tol: f64) -> i8 {
    if v > tol {
        1
    } else if v < -tol {
        -1
    } else {
        0
    }
}

/// Outcome of the ratio test.
#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Blocked { alpha: f64, blocking: Vec<usize> },
    Unbounded,
}

/// Largest `alpha` with `x + alpha y` in `P`, and the rows attaining it.
///
/// Rows already tight at `x` whose `(By)_i` is within feasibility noise are skipped: the
/// direction is legal for them by construction.
pub fn max_step(lp: &GeneralFormLP, x: &Point, y: &Direction, tol: &Tolerances) -> Result<Step> {
    crate::error::check_len("point", lp.n(), x.x.len())?;
    crate::error::check_len("direction", lp.n(), y.y.len())?;
    let tau_ratio = 1e-10 * (1.0 + lp::inf_norm(&y.by));
    let bm = lp.ineq_matrix();
    let mut best = f64::INFINITY;
    let mut ratios = Vec::new();
    for (i, (&byi, &slack)) in y.by.iter().zip(&x.ineq_slack).enumerate() {
        if byi <= tau_ratio {
            continue;
        }
        if slack.abs() <= tol.act && byi <= tol.feas * (1.0 + bm.row_inf_norm(i)) {
            continue;
        }
        let r = slack.max(0.0) / byi;
        best = best.min(r);
        ratios.push((i, r));
    }
    if ratios.is_empty() {
        return Ok(Step::Unbounded);
    }
    let window = best + BLOCKING_TIE * best.abs().max(f64::MIN_POSITIVE);
    let blocking = ratios.iter().filter(|(_, r)| *r <= window).map(|(i, _)| *i).collect();
    Ok(Step::Blocked { alpha: best, blocking })
}

/// One least-norm correction of `x` towards `A x = b` and `B_i x = d_i` on `rows`.
fn refine(lp: &GeneralFormLP, x: &[f64], rows: &[usize]) -> Vec<f64> {
    let n = lp.n();
    let mut m: Vec<Vec<f64>> = Vec::new();
    let mut r: Vec<f64> = Vec::new();
    for i in 0..lp.m_eq() {
        m.push(lp.eq_matrix().row_dense(i));
        r.push(lp.eq_rhs()[i] - lp.eq_matrix().row_dot(i, x));
    }
    for &i in rows {
        m.push(lp.ineq_matrix().row_dense(i));
        r.push(lp.ineq_rhs()[i] - lp.ineq_matrix().row_dot(i, x));
    }
    let k = m.len();
    if k == 0 || r.iter().all(|v| *v == 0.0) {
        return x.to_vec();
    }
    // Solve (M M^T) w = r by Gaussian elimination, dropping dependent rows; delta = M^T w.
    let mut g: Vec<Vec<f64>> = (0..k)
        .map(|a| (0..k).map(|b| lp::dot(&m[a], &m[b])).collect())
        .collect();
    let mut rhs = r.clone();
    let mut pivot_of = vec![usize::MAX; k];
    let mut used = vec![false; k];
    for col in 0..k {
        let scale = g[col][col].abs().max(1.0);
        let Some(p) = (0..k)
            .filter(|&i| !used[i])
            .max_by(|&a, &b| g[a][col].abs().total_cmp(&g[b][col].abs()))
            .filter(|&p| g[p][col].abs() > 1e-12 * scale)
        else {
            continue;
        };
        used[p] = true;
        pivot_of[col] = p;
        for i in 0..k {
            if i != p && g[i][col] != 0.0 {
                let f = g[i][col] / g[p][col];
                for j in 0..k {
                    g[i][j] -= f * g[p][j];
                }
                rhs[i] -= f * rhs[p];
            }
        }
    }
    let mut w = vec![0.0; k];
    for col in 0..k {
        let p = pivot_of[col];
        if p != usize::MAX {
            w[col] = rhs[p] / g[p][col];
        }
    }
    let mut out = x.to_vec();
    for (a, wa) in w.iter().enumerate() {
        if *wa != 0.0 {
            for j in 0..n {
                out[j] += m[a][j] * wa;
            }
        }
    }
    let worst = |z: &[f64]| -> f64 {
        let mut v = 0.0_f64;
        for i in 0..lp.m_eq() {
            v = v.max((lp.eq_matrix().row_dot(i, z) - lp.eq_rhs()[i]).abs());
        }
        for i in 0..lp.m_ineq() {
            v = v.max(lp.ineq_matrix().row_dot(i, z) - lp.ineq_rhs()[i]);
        }
        v
    };
    if worst(&out) <= worst(x) {
        out
    } else {
        x.to_vec()
    }
}

/// Runs the augmentation scheme from the feasible point `x0`.
pub fn run_steepest_descent(lp: &GeneralFormLP, x0: &Point, opts: &AugmentOptions) -> Result<Trace> {
    let started = Instant::now();
    let tol = opts.tol;
    let cap = opts.max_iters.unwrap_or(50 * (lp.n() + lp.m_ineq()));
    let term = tol.term * (1.0 + lp::inf_norm(lp.c()));
    let mut model = build_steepest(lp, x0, &tol, opts.reduce_parallel_facets)?;
    let mut x = Point::evaluate(lp, x0.x.clone())?;
    let mut trace = Trace {
        problem: lp.name().to_string(),
        mode: opts.mode,
        status: TraceStatus::Optimal,
        initial_objective: lp.objective(&x.x),
        steps: Vec::new(),
        solves: Vec::new(),
        final_point: x.clone(),
        unbounded_ray: None,
        total_seconds: 0.0,
    };
    let mut tiny_steps = 0;
    loop {
        let active = model.active().clone();
        let t = Instant::now();
        let solved = model.solve_direction(lp, opts.mode, &opts.simplex);
        let seconds = t.elapsed().as_secs_f64();
        let out = match solved {
            Ok(out) => out,
            Err(Error::OriginalUnboundedInLineality { ray }) => {
                trace.status = TraceStatus::Unbounded;
                trace.unbounded_ray = Some(ray);
                break;
            }
            Err(e) => return Err(e),
        };
        let first = trace.solves.is_empty();
        trace.solves.push(SolveRecord {
            seconds,
            phase1_seconds: if first {
                out.result.time_phase1.as_secs_f64()
            } else {
                0.0
            },
            phase2_seconds: if first {
                out.result.time_phase2.as_secs_f64()
            } else {
                0.0
            },
            pivots: out.result.iterations(),
            warm: out.warm,
            subproblem_objective: out.subproblem_objective,
            active,
        });
        let y = out.direction;
        let rate = y.objective_rate(lp);
        let Some(steep) = y.steepness.filter(|_| rate < -term) else {
            trace.status = TraceStatus::Optimal;
            break;
        };
        if trace.steps.len() >= cap {
            trace.status = TraceStatus::IterationLimit;
            break;
        }
        let (alpha, blocking) = match max_step(lp, &x, &y, &tol)? {
            Step::Unbounded => {
                trace.status = TraceStatus::Unbounded;
                trace.unbounded_ray = Some(y.y.clone());
                break;
            }
            Step::Blocked { alpha, blocking } => (alpha, blocking),
        };
        let moved: Vec<f64> = x.x.iter().zip(&y.y).map(|(xi, yi)| xi + alpha * yi).collect();
        let mut tight: Vec<usize> = blocking.clone();
        tight.extend(model.active().rows.iter().filter(|&&i| y.by[i].abs() <= tol.feas));
        tight.sort_unstable();
        tight.dedup();
        let refined = refine(lp, &moved, &tight);
        let (next, feasible) = check_feasible(lp, &refined, tol.feas)?;
        if !feasible {
            warn!(
                "{}: step {} left P (slack {:.3e})",
                lp.name(),
                trace.steps.len(),
                next.min_slack()
            );
            return Err(Error::Numerical(format!(
                "iterate {} is infeasible",
                trace.steps.len() + 1
            )));
        }
        if alpha < STALL_ALPHA {
            tiny_steps += 1;
        } else {
            tiny_steps = 0;
        }
        let orthant =
            y.by.iter()
                .map(|v| sign(*v, 1e-9 * (1.0 + lp::inf_norm(&y.by))))
                .collect();
        debug!(
            "{}: step {} alpha {alpha:.3e} steepness {steep:.6e}",
            lp.name(),
            trace.steps.len()
        );
        trace.steps.push(StepRecord {
            iteration: trace.steps.len(),
            direction: y,
            alpha,
            blocking,
            objective: lp.objective(&next.x),
            steepness: steep,
            orthant,
            elapsed: started.elapsed().as_secs_f64(),
            x: next.x.clone(),
        });
        x = next;
        model.update_active_bounds(lp, &x, tol.act)?;
        if tiny_steps >= STALL_STEPS {
            trace.status = TraceStatus::NumericalStall;
            break;
        }
    }
    trace.final_point = x;
    trace.total_seconds = started.elapsed().as_secs_f64();
    Ok(trace)
}

/// Pass/fail for one named invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, failures: Vec<String>, ok_detail: String) -> Check {
        Check {
            name: name.to_string(),
            passed: failures.is_empty(),
            detail: if failures.is_empty() {
                ok_detail
            } else {
                failures.join("; ")
            },
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: VerifyReport) {
        self.checks.extend(other.checks);
    }
}

fn steep_tol(s: f64) -> f64 {
    1e-9 * (1.0 + s.abs())
}

/// Sign patterns with some row of strictly opposite sign.
fn opposite_somewhere(a: &[i8], b: &[i8]) -> bool {
    a.iter().zip(b).any(|(x, y)| x * y < 0)
}

fn normalized(y: &[f64]) -> Vec<f64> {
    let s = lp::inf_norm(y);
    y.iter().map(|v| if s > 0.0 { v / s } else { 0.0 }).collect()
}

/// Checks (a) monotone steepness, (b) orthant change implies a strict change, (c) the
/// iteration bound when an oracle is given, (d) no repeated vertex directions, plus
/// feasibility, maximality and strict improvement of every step.
pub fn verify_trace(lp: &GeneralFormLP, trace: &Trace, oracle: Option<&CircuitOracle>) -> VerifyReport {
    let tol = Tolerances::default();
    let steps = &trace.steps;
    let mut report = VerifyReport::default();

    let mut bad = Vec::new();
    for w in steps.windows(2) {
        if w[1].steepness < w[0].steepness - steep_tol(w[0].steepness) {
            bad.push(format!(
                "step {}: {:.12e} after {:.12e}",
                w[1].iteration, w[1].steepness, w[0].steepness
            ));
        }
    }
    report
        .checks
        .push(Check::new("monotone-steepness", bad, format!("{} steps", steps.len())));

    let mut bad = Vec::new();
    let mut changes = 0;
    for w in steps.windows(2) {
        if opposite_somewhere(&w[0].orthant, &w[1].orthant) {
            changes += 1;
            if w[1].steepness <= w[0].steepness + steep_tol(w[0].steepness) {
                bad.push(format!(
                    "step {}: orthant changed but steepness stayed {:.12e}",
                    w[1].iteration, w[1].steepness
                ));
            }
        }
    }
    report
        .checks
        .push(Check::new("orthant-change", bad, format!("{changes} orthant changes")));

    if let Some(o) = oracle {
        let bound = o.iteration_bound();
        let bad = if steps.len() > bound {
            vec![format!("{} iterations exceed bound {bound}", steps.len())]
        } else {
            Vec::new()
        };
        report.checks.push(Check::new(
            "iteration-bound",
            bad,
            format!(
                "{} <= {} = {} x {}",
                steps.len(),
                bound,
                o.kernel_dim(),
                o.distinct_ratios().len()
            ),
        ));
    }

    let mut bad = Vec::new();
    let vertex: Vec<(usize, Vec<f64>)> = steps
        .iter()
        .filter(|s| s.direction.is_vertex_solution)
        .map(|s| (s.iteration, normalized(&s.direction.y)))
        .collect();
    for (i, (ia, a)) in vertex.iter().enumerate() {
        for (ib, b) in &vertex[i + 1..] {
            if a.iter().zip(b).all(|(u, v)| (u - v).abs() <= 1e-9) {
                bad.push(format!("steps {ia} and {ib} repeat a direction"));
            }
        }
    }
    report.checks.push(Check::new(
        "no-repeated-circuit",
        bad,
        format!("{} vertex directions", vertex.len()),
    ));

    let mut bad = Vec::new();
    let mut x = trace.final_point.x.clone();
    // Walk backwards from the final point to recover every iterate.
    let mut iterates = vec![x.clone()];
    for s in steps.iter().rev() {
        x = x.iter().zip(&s.direction.y).map(|(xi, yi)| xi - s.alpha * yi).collect();
        iterates.push(x.clone());
    }
    iterates.reverse();
    for (k, s) in steps.iter().enumerate() {
        let after = &iterates[k + 1];
        match check_feasible(lp, after, tol.feas) {
            Ok((p, true)) => {
                if !s
                    .blocking
                    .iter()
                    .any(|&i| p.ineq_slack[i].abs() <= tol.act * (1.0 + s.direction.by[i].abs()))
                {
                    bad.push(format!("step {}: no blocking row became active", s.iteration));
                }
            }
            _ => bad.push(format!("step {}: iterate infeasible", s.iteration)),
        }
    }
    report.checks.push(Check::new(
        "feasible-and-maximal",
        bad,
        format!("{} iterates", steps.len()),
    ));

    let mut bad = Vec::new();
    let mut prev = trace.initial_objective;
    let cnorm = lp::inf_norm(lp.c());
    for s in steps {
        if s.objective >= prev - tol.term * s.alpha * cnorm / 2.0 {
            bad.push(format!(
                "step {}: objective {} after {}",
                s.iteration, s.objective, prev
            ));
        }
        prev = s.objective;
    }
    report.checks.push(Check::new("strict-improvement", bad, String::new()));
    report
}

/// Oracle cross-checks of a trace: steepness agreement at every solve, vertex directions are
/// circuits, and conformal circuits of each direction share its steepness exactly.
pub fn oracle_checks(trace: &Trace, oracle: &CircuitOracle) -> VerifyReport {
    let mut report = VerifyReport::default();
    let mut agree = Vec::new();
    let mut member = Vec::new();
    let mut equal = Vec::new();
    let mut worst = 0.0_f64;
    let mut vertex_steps = 0;
    for (k, solve) in trace.solves.iter().enumerate() {
        let want = oracle.steepest_at(&solve.active.rows);
        match trace.steps.get(k) {
            Some(step) => {
                let Some(min) = want.min_ratio_f64() else {
                    agree.push(format!("solve {k}: oracle has no feasible circuit"));
                    continue;
                };
                let err = (step.steepness - min).abs();
                worst = worst.max(err);
                if err > 1e-9 {
                    agree.push(format!(
                        "solve {k}: steepness {:.12e} vs oracle {:.12e}",
                        step.steepness, min
                    ));
                }
                let y_exact = oracle.snap_to_kernel(&step.direction.y);
                if step.direction.is_vertex_solution {
                    vertex_steps += 1;
                    let g = rational::to_coprime_integers(&y_exact);
                    if !oracle.contains(&g) {
                        member.push(format!("solve {k}: {g:?} is not a circuit"));
                    }
                }
                match (oracle.decompose(&y_exact), want.min_ratio.as_ref()) {
                    (Ok(dec), Some(min)) => {
                        for (_, c) in &dec.terms {
                            let r = c.ratio(oracle.objective());
                            if &r != min {
                                equal.push(format!(
                                    "solve {k}: conformal circuit {:?} has ratio {r}, steepest is {min}",
                                    c.g
                                ));
                            }
                        }
                    }
                    (Err(e), _) => equal.push(format!("solve {k}: decomposition failed: {e}")),
                    (_, None) => {}
                }
            }
            None if trace.status == TraceStatus::Optimal && !want.is_optimal() => {
                agree.push(format!(
                    "final solve: terminated but oracle finds ratio {}",
                    want.min_ratio.map(|r| r.to_string()).unwrap_or_default()
                ));
            }
            None => {}
        }
    }
    report.checks.push(Check::new(
        "oracle-steepness",
        agree,
        format!("{} solves, max error {worst:.1e}", trace.solves.len()),
    ));
    report.checks.push(Check::new(
        "vertex-is-circuit",
        member,
        format!("{vertex_steps} vertex directions"),
    ));
    report.checks.push(Check::new(
        "conformal-equal-steepness",
        equal,
        format!("{} directions", trace.steps.len()),
    ));
    report
}

/// Whether every conformal circuit of the exact direction `y` has ratio exactly `ratio`.
pub fn conformal_ratios_equal(oracle: &CircuitOracle, y: &[rational::Q], ratio: &rational::Q) -> Result<bool> {
    let dec = oracle.decompose(y)?;
    Ok(dec
        .terms
        .iter()
        .all(|(l, c)| l.is_positive() && &c.ratio(oracle.objective()) == ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::par::Execution;
    use crate::simplex::phase1_feasible_point;

    fn origin(lp: &GeneralFormLP) -> Point {
        Point::evaluate(lp, vec![0.0; lp.n()]).unwrap()
    }

    fn dir(lp: &GeneralFormLP, y: &[f64]) -> Direction {
        Direction::new(lp, y.to_vec(), true, 1e-11).unwrap()
    }

    #[test]
    fn ratio_tests() {
        let lp = instances::triangle();
        let tol = Tolerances::default();
        let x = origin(&lp);
        assert_eq!(
            max_step(&lp, &x, &dir(&lp, &[1.0, 0.0]), &tol).unwrap(),
            Step::Blocked {
                alpha: 1.0,
                blocking: vec![2]
            }
        );
        assert_eq!(
            max_step(&lp, &x, &dir(&lp, &[1.0, 1.0]), &tol).unwrap(),
            Step::Blocked {
                alpha: 0.5,
                blocking: vec![2]
            }
        );
        let ray = GeneralFormLP::from_dense("ray", vec![-1.0], &[], vec![], &[vec![-1.0]], vec![0.0]).unwrap();
        assert_eq!(
            max_step(&ray, &origin(&ray), &dir(&ray, &[1.0]), &tol).unwrap(),
            Step::Unbounded
        );
    }

    #[test]
    fn triangle_run() {
        let lp = instances::triangle();
        for mode in SolveMode::ALL {
            let opts = AugmentOptions {
                mode,
                ..AugmentOptions::default()
            };
            let trace = run_steepest_descent(&lp, &origin(&lp), &opts).unwrap();
            assert_eq!(trace.status, TraceStatus::Optimal);
            assert_eq!(trace.n_iters(), 1);
            assert!(
                (trace.steps[0].alpha - 2.0).abs() < 1e-9,
                "y is (1/2, 0), alpha {}",
                trace.steps[0].alpha
            );
            assert!((trace.final_objective() + 2.0).abs() < 1e-12);
            assert!((trace.final_point.x[0] - 1.0).abs() < 1e-12);
            assert_eq!(trace.solves.len(), 2);
            let oracle = CircuitOracle::new(&lp, Execution::Sequential).unwrap();
            let report = verify_trace(&lp, &trace, Some(&oracle));
            assert!(report.passed(), "{report:?}");
            assert_eq!(report.get("iteration-bound").unwrap().detail, "1 <= 8 = 2 x 4");
            let report = oracle_checks(&trace, &oracle);
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn optimal_start_takes_no_steps() {
        let lp = instances::triangle();
        let x = Point::evaluate(&lp, vec![1.0, 0.0]).unwrap();
        let trace = run_steepest_descent(&lp, &x, &AugmentOptions::default()).unwrap();
        assert_eq!(trace.status, TraceStatus::Optimal);
        assert_eq!(trace.n_iters(), 0);
    }

    #[test]
    fn cube_reaches_the_far_corner() {
        let lp = instances::cube(3);
        let trace = run_steepest_descent(&lp, &origin(&lp), &AugmentOptions::default()).unwrap();
        assert_eq!(trace.status, TraceStatus::Optimal);
        assert!((trace.final_objective() + 3.0).abs() < 1e-9);
        for s in &trace.steps {
            assert!((s.steepness + 0.5).abs() < 1e-12);
        }
        let oracle = CircuitOracle::new(&lp, Execution::Sequential).unwrap();
        assert!(verify_trace(&lp, &trace, Some(&oracle)).passed());
        assert!(oracle_checks(&trace, &oracle).passed());
    }

    #[test]
    fn unbounded_problem() {
        let lp = GeneralFormLP::from_dense(
            "ray",
            vec![-1.0, 0.0],
            &[],
            vec![],
            &[vec![-1.0, 0.0], vec![0.0, -1.0], vec![0.0, 1.0]],
            vec![0.0, 0.0, 1.0],
        )
        .unwrap();
        let trace = run_steepest_descent(&lp, &origin(&lp), &AugmentOptions::default()).unwrap();
        assert_eq!(trace.status, TraceStatus::Unbounded);
        assert!(trace.unbounded_ray.unwrap()[0] > 0.0);
    }

    #[test]
    fn constructed_violations_are_caught() {
        let lp = instances::triangle();
        let trace = run_steepest_descent(&lp, &origin(&lp), &AugmentOptions::default()).unwrap();
        let mut twice = trace.clone();
        let mut extra = twice.steps[0].clone();
        extra.iteration = 1;
        extra.steepness = -2.0;
        twice.steps.push(extra);
        let report = verify_trace(&lp, &twice, None);
        assert!(!report.get("monotone-steepness").unwrap().passed);
        assert!(!report.get("no-repeated-circuit").unwrap().passed);
    }

    #[test]
    fn packing_run_is_consistent() {
        let lp = instances::random_packing(4, 12, 8);
        let (x0, _, _) = phase1_feasible_point(&lp, &SimplexOptions::default()).unwrap();
        let trace = run_steepest_descent(&lp, &x0, &AugmentOptions::default()).unwrap();
        assert_eq!(trace.status, TraceStatus::Optimal);
        let (std, _) = crate::simplex::to_computational_form(&lp);
        let reference = crate::simplex::primal_solve(&std, None, &SimplexOptions::default());
        assert!((reference.objective - trace.final_objective()).abs() <= 1e-6 * (1.0 + reference.objective.abs()));
        let report = verify_trace(&lp, &trace, None);
        assert!(report.passed(), "{report:?}");
    }
}
