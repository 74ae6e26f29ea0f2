use std::time::{Duration, Instant};

use log::{debug, warn};

use super::lu::BasisFactor;
use super::{
    default_status, Basis, PivotRule, SimplexOptions, SimplexResult, SimplexStatus, StandardLP, TracePoint, VarStatus,
};

/// Smallest pivot element accepted in either ratio test.
const PIVOT_TOL: f64 = 1e-9;
/// Internal primal feasibility threshold for deciding which basics are infeasible.
const PRIMAL_TOL: f64 = 1e-9;
/// Step length below which a pivot counts as degenerate.
const DEGENERATE_STEP: f64 = 1e-12;
/// Number of post-optimal cleanups before giving up.
const MAX_CLEANUPS: usize = 4;

enum Outcome {
    Optimal,
    Infeasible(Vec<f64>),
    Unbounded(Vec<f64>),
    IterationLimit,
}

struct Clock {
    start: Instant,
    phase1_end: Option<Instant>,
}

impl Clock {
    fn new() -> Self {
        Clock {
            start: Instant::now(),
            phase1_end: None,
        }
    }

    fn end_phase1(&mut self) {
        if self.phase1_end.is_none() {
            self.phase1_end = Some(Instant::now());
        }
    }

    fn split(&self) -> (Duration, Duration) {
        let now = Instant::now();
        match self.phase1_end {
            Some(t) => (t - self.start, now - t),
            None => (Duration::ZERO, now - self.start),
        }
    }
}

struct Engine<'a> {
    std: &'a StandardLP,
    opts: &'a SimplexOptions,
    n: usize,
    m: usize,
    logical: Vec<(usize, f64)>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    basic: Vec<usize>,
    status: Vec<VarStatus>,
    x: Vec<f64>,
    factor: BasisFactor,
    since_refactor: usize,
    refactorizations: usize,
    iters_phase1: usize,
    iters_phase2: usize,
    in_phase1: bool,
    max_iters: usize,
    degenerate_run: usize,
    degenerate_total: usize,
    bland: bool,
    trace: Vec<TracePoint>,
    started: Instant,
}

impl<'a> Engine<'a> {
    fn new(std: &'a StandardLP, start: Option<&Basis>, opts: &'a SimplexOptions) -> Self {
        let n = std.num_cols();
        let m = std.num_rows();
        let mut lower = std.l.clone();
        let mut upper = std.u.clone();
        lower.resize(n + m, 0.0);
        upper.resize(n + m, 0.0);
        let mut cost = std.q.clone();
        cost.resize(n + m, 0.0);
        let basis = match start {
            Some(b) if b.basic.len() == m && b.is_consistent(n + m) => b.clone(),
            Some(_) => {
                warn!("warm-start basis does not match the problem shape; using a crash basis");
                Basis::crash(std)
            }
            None => Basis::crash(std),
        };
        let max_iters = opts.max_iters.unwrap_or(100 * (m + n)).max(1);
        let mut engine = Engine {
            std,
            opts,
            n,
            m,
            logical: (0..m).map(|i| (i, 1.0)).collect(),
            lower,
            upper,
            cost,
            rhs: std.f.clone(),
            basic: basis.basic,
            status: basis.status,
            x: vec![0.0; n + m],
            // Placeholder; replaced by the first refactorization.
            factor: BasisFactor::new(0, &[]).ok().expect("empty factor"),
            since_refactor: 0,
            refactorizations: 0,
            iters_phase1: 0,
            iters_phase2: 0,
            in_phase1: false,
            max_iters,
            degenerate_run: 0,
            degenerate_total: 0,
            bland: opts.pivot_rule == PivotRule::Bland,
            trace: Vec::new(),
            started: Instant::now(),
        };
        engine.normalize_statuses();
        engine.refactor();
        engine
    }

    fn col(&self, j: usize) -> &[(usize, f64)] {
        if j < self.n {
            self.std.column(j)
        } else {
            std::slice::from_ref(&self.logical[j - self.n])
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lower[j] == self.upper[j]
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower => self.lower[j],
            VarStatus::AtUpper => self.upper[j],
            VarStatus::FreeZero => 0.0,
            VarStatus::Basic => self.x[j],
        }
    }

    /// Puts every nonbasic column on a finite bound when it has one.
    fn normalize_statuses(&mut self) {
        for j in 0..self.n + self.m {
            let (l, u) = (self.lower[j], self.upper[j]);
            let s = match self.status[j] {
                VarStatus::Basic => VarStatus::Basic,
                VarStatus::AtLower if l.is_finite() => VarStatus::AtLower,
                VarStatus::AtUpper if u.is_finite() => VarStatus::AtUpper,
                VarStatus::FreeZero if !l.is_finite() && !u.is_finite() => VarStatus::FreeZero,
                _ => default_status(l, u),
            };
            self.status[j] = s;
            if s != VarStatus::Basic {
                self.x[j] = self.nonbasic_value(j);
            }
        }
    }

    fn refactor(&mut self) {
        loop {
            let cols: Vec<Vec<(usize, f64)>> = self.basic.iter().map(|&j| self.col(j).to_vec()).collect();
            match BasisFactor::new(self.m, &cols) {
                Ok(f) => {
                    self.factor = f;
                    break;
                }
                Err(s) => {
                    debug!(
                        "basis singular at {} positions; substituting logicals",
                        s.positions.len()
                    );
                    for (&pos, &row) in s.positions.iter().zip(&s.rows) {
                        let out = self.basic[pos];
                        let (l, u) = (self.lower[out], self.upper[out]);
                        let v = self.x[out];
                        self.status[out] = if l.is_finite() && u.is_finite() {
                            if (v - l).abs() <= (u - v).abs() {
                                VarStatus::AtLower
                            } else {
                                VarStatus::AtUpper
                            }
                        } else {
                            default_status(l, u)
                        };
                        self.x[out] = self.nonbasic_value(out);
                        let logical = self.n + row;
                        self.basic[pos] = logical;
                        self.status[logical] = VarStatus::Basic;
                    }
                }
            }
        }
        self.since_refactor = 0;
        self.refactorizations += 1;
        self.compute_basic_values();
    }

    fn compute_basic_values(&mut self) {
        let mut r = self.rhs.clone();
        for j in 0..self.n + self.m {
            if self.status[j] != VarStatus::Basic {
                let v = self.x[j];
                if v != 0.0 {
                    for &(i, a) in self.col(j) {
                        r[i] -= a * v;
                    }
                }
            }
        }
        let xb = self.factor.ftran(&r);
        for (t, &j) in self.basic.iter().enumerate() {
            self.x[j] = xb[t];
        }
    }

    fn residual(&self) -> f64 {
        let mut r: Vec<f64> = self.rhs.iter().map(|v| -v).collect();
        for j in 0..self.n + self.m {
            let v = self.x[j];
            if v != 0.0 {
                for &(i, a) in self.col(j) {
                    r[i] += a * v;
                }
            }
        }
        r.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn dot_col(&self, j: usize, y: &[f64]) -> f64 {
        self.col(j).iter().map(|&(i, a)| a * y[i]).sum()
    }

    fn scatter_col(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.m];
        for &(i, a) in self.col(j) {
            v[i] += a;
        }
        v
    }

    fn duals(&self, basic_costs: &[f64]) -> Vec<f64> {
        self.factor.btran(basic_costs)
    }

    fn basic_costs(&self) -> Vec<f64> {
        self.basic.iter().map(|&j| self.cost[j]).collect()
    }

    fn reduced_costs(&self) -> Vec<f64> {
        let y = self.duals(&self.basic_costs());
        (0..self.n + self.m)
            .map(|j| {
                if self.status[j] == VarStatus::Basic {
                    0.0
                } else {
                    self.cost[j] - self.dot_col(j, &y)
                }
            })
            .collect()
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        let tol_l = PRIMAL_TOL * (1.0 + self.lower[j].abs().min(1e12));
        let tol_u = PRIMAL_TOL * (1.0 + self.upper[j].abs().min(1e12));
        if v < self.lower[j] - tol_l {
            self.lower[j] - v
        } else if v > self.upper[j] + tol_u {
            v - self.upper[j]
        } else {
            0.0
        }
    }

    fn after_pivot(&mut self, step: f64) {
        if self.in_phase1 {
            self.iters_phase1 += 1;
        } else {
            self.iters_phase2 += 1;
        }
        if step.abs() <= DEGENERATE_STEP {
            self.degenerate_run += 1;
            self.degenerate_total += 1;
            if self.degenerate_run >= self.opts.bland_after && !self.bland {
                debug!(
                    "{} consecutive degenerate pivots; switching to Bland's rule",
                    self.degenerate_run
                );
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            if self.opts.pivot_rule != PivotRule::Bland {
                self.bland = false;
            }
        }
        self.since_refactor += 1;
        if self.since_refactor >= self.opts.refactor_every || self.residual() > self.opts.drift_tol {
            self.refactor();
        }
        if self.opts.record_trace {
            let objective = self.std.objective(&self.x[..self.n]);
            self.trace.push(TracePoint {
                iteration: self.iters_phase1 + self.iters_phase2,
                seconds: self.started.elapsed().as_secs_f64(),
                objective,
            });
        }
    }

    fn iterations(&self) -> usize {
        self.iters_phase1 + self.iters_phase2
    }

    fn replace_basic(&mut self, pos: usize, entering: usize, alpha: &[f64], leaving_status: VarStatus) {
        let leaving = self.basic[pos];
        self.status[leaving] = leaving_status;
        self.x[leaving] = self.nonbasic_value(leaving);
        self.basic[pos] = entering;
        self.status[entering] = VarStatus::Basic;
        self.factor.update(pos, alpha);
    }

    // ----- primal simplex -------------------------------------------------------------

    /// Composite primal simplex: minimizes the sum of bound violations while any basic
    /// variable is infeasible, then the true objective.
    fn primal(&mut self, clock: &mut Clock) -> Outcome {
        loop {
            if self.iterations() >= self.max_iters {
                return Outcome::IterationLimit;
            }
            let mut phase_costs = vec![0.0; self.m];
            let mut infeasible = false;
            for (t, &j) in self.basic.iter().enumerate() {
                let v = self.x[j];
                if self.infeasibility(j) > 0.0 {
                    infeasible = true;
                    phase_costs[t] = if v < self.lower[j] { -1.0 } else { 1.0 };
                }
            }
            if infeasible {
                self.in_phase1 = true;
            } else {
                if self.in_phase1 {
                    self.in_phase1 = false;
                }
                clock.end_phase1();
            }
            let basic_costs = if infeasible { phase_costs } else { self.basic_costs() };
            let y = self.duals(&basic_costs);

            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.n + self.m {
                if self.status[j] == VarStatus::Basic || self.is_fixed(j) {
                    continue;
                }
                let cj = if infeasible { 0.0 } else { self.cost[j] };
                let d = cj - self.dot_col(j, &y);
                let eligible = match self.status[j] {
                    VarStatus::AtLower => d < -self.opts.tol_opt,
                    VarStatus::AtUpper => d > self.opts.tol_opt,
                    VarStatus::FreeZero => d.abs() > self.opts.tol_opt,
                    VarStatus::Basic => false,
                };
                if !eligible {
                    continue;
                }
                if self.bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.is_none_or(|(_, best)| d.abs() > best.abs()) {
                    entering = Some((j, d));
                }
            }
            let Some((q, dq)) = entering else {
                return if infeasible {
                    Outcome::Infeasible(y)
                } else {
                    Outcome::Optimal
                };
            };

            let dir = if dq < 0.0 { 1.0 } else { -1.0 };
            let alpha = self.factor.ftran(&self.scatter_col(q));
            let ratio = self.primal_ratio_test(q, dir, &alpha);
            match ratio {
                None => {
                    if infeasible {
                        // Phase I objective is bounded below; only numerical noise gets here.
                        self.refactor();
                        if self.iterations() >= self.max_iters {
                            return Outcome::IterationLimit;
                        }
                        self.iters_phase1 += 1;
                        continue;
                    }
                    let mut ray = vec![0.0; self.n];
                    if q < self.n {
                        ray[q] = dir;
                    }
                    for (t, &j) in self.basic.iter().enumerate() {
                        if j < self.n {
                            ray[j] = -dir * alpha[t];
                        }
                    }
                    return Outcome::Unbounded(ray);
                }
                Some((theta, leave)) => {
                    for (t, &j) in self.basic.iter().enumerate() {
                        self.x[j] -= theta * dir * alpha[t];
                    }
                    self.x[q] += theta * dir;
                    match leave {
                        None => {
                            self.status[q] = if dir > 0.0 {
                                VarStatus::AtUpper
                            } else {
                                VarStatus::AtLower
                            };
                            self.x[q] = self.nonbasic_value(q);
                        }
                        Some((pos, to_upper)) => {
                            let s = if to_upper {
                                VarStatus::AtUpper
                            } else {
                                VarStatus::AtLower
                            };
                            self.replace_basic(pos, q, &alpha, s);
                        }
                    }
                    self.after_pivot(theta);
                }
            }
        }
    }

    /// Bounded two-pass ratio test: exact minimum first, then the largest pivot among ties
    /// (smallest index under Bland). `Some((theta, None))` is a bound flip of the entering column.
    fn primal_ratio_test(&self, q: usize, dir: f64, alpha: &[f64]) -> Option<(f64, Option<(usize, bool)>)> {
        let mut cands: Vec<(f64, usize, bool)> = Vec::new();
        for (t, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basic[t];
            let rate = -dir * a;
            let (v, l, u) = (self.x[j], self.lower[j], self.upper[j]);
            let tol_l = PRIMAL_TOL * (1.0 + l.abs().min(1e12));
            let tol_u = PRIMAL_TOL * (1.0 + u.abs().min(1e12));
            let (bound, to_upper) = if rate < 0.0 {
                if v > u + tol_u {
                    (u, true)
                } else if v >= l - tol_l && l.is_finite() {
                    (l, false)
                } else {
                    continue;
                }
            } else if v < l - tol_l {
                (l, false)
            } else if v <= u + tol_u && u.is_finite() {
                (u, true)
            } else {
                continue;
            };
            let theta = ((bound - v) / rate).max(0.0);
            cands.push((theta, t, to_upper));
        }
        let range = self.upper[q] - self.lower[q];
        let min_theta = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        if range.is_finite() && range <= min_theta {
            return Some((range, None));
        }
        if !min_theta.is_finite() {
            return None;
        }
        let tie = min_theta + 1e-12 * (1.0 + min_theta);
        let chosen = cands
            .iter()
            .filter(|c| c.0 <= tie)
            .min_by(|a, b| {
                if self.bland {
                    self.basic[a.1].cmp(&self.basic[b.1])
                } else {
                    alpha[b.1]
                        .abs()
                        .partial_cmp(&alpha[a.1].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.1.cmp(&b.1))
                }
            })
            .copied()
            .expect("non-empty tie set");
        Some((min_theta, Some((chosen.1, chosen.2))))
    }

    // ----- dual simplex ---------------------------------------------------------------

    /// Sets boxed nonbasic columns to the bound matching the sign of their reduced cost and
    /// reports whether the basis is then dual feasible.
    fn make_dual_feasible(&mut self) -> bool {
        let d = self.reduced_costs();
        let tol = self.opts.tol_opt;
        let mut feasible = true;
        for j in 0..self.n + self.m {
            if self.status[j] == VarStatus::Basic {
                continue;
            }
            let (l, u) = (self.lower[j], self.upper[j]);
            let s = if l.is_finite() && u.is_finite() {
                if l == u {
                    VarStatus::AtLower
                } else if d[j] < -tol {
                    VarStatus::AtUpper
                } else if d[j] > tol {
                    VarStatus::AtLower
                } else {
                    self.status[j]
                }
            } else if l.is_finite() {
                feasible &= d[j] >= -tol;
                VarStatus::AtLower
            } else if u.is_finite() {
                feasible &= d[j] <= tol;
                VarStatus::AtUpper
            } else {
                feasible &= d[j].abs() <= tol;
                VarStatus::FreeZero
            };
            self.status[j] = s;
            self.x[j] = self.nonbasic_value(j);
        }
        self.compute_basic_values();
        feasible
    }

    /// Dual phase I: solve the auxiliary problem with shifted bounds (boxed columns fixed to
    /// zero, one-sided columns boxed to unit length) and zero right-hand side.
    fn dual_phase1(&mut self) -> bool {
        let saved = (self.lower.clone(), self.upper.clone(), self.rhs.clone());
        for j in 0..self.n + self.m {
            let (l, u) = (self.lower[j], self.upper[j]);
            let (al, au) = match (l.is_finite(), u.is_finite()) {
                (true, true) => (0.0, 0.0),
                (true, false) => (0.0, 1.0),
                (false, true) => (-1.0, 0.0),
                (false, false) => (-1.0, 1.0),
            };
            self.lower[j] = al;
            self.upper[j] = au;
        }
        self.rhs = vec![0.0; self.m];
        self.in_phase1 = true;
        self.make_dual_feasible();
        let outcome = self.dual();
        self.in_phase1 = false;
        (self.lower, self.upper, self.rhs) = saved;
        let ok = matches!(outcome, Outcome::Optimal) && self.make_dual_feasible();
        if !ok {
            // Restore nonbasic values for the original bounds before any primal fallback.
            self.normalize_statuses();
            self.compute_basic_values();
        }
        ok
    }

    fn dual(&mut self) -> Outcome {
        loop {
            if self.iterations() >= self.max_iters {
                return Outcome::IterationLimit;
            }
            // Leaving row: largest bound violation (smallest index under Bland).
            let mut leave: Option<(usize, f64)> = None;
            for (t, &j) in self.basic.iter().enumerate() {
                let infeas = self.infeasibility(j);
                if infeas <= 0.0 {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((bt, bi)) => {
                        if self.bland {
                            j < self.basic[bt]
                        } else {
                            infeas > bi
                        }
                    }
                };
                if better {
                    leave = Some((t, infeas));
                }
            }
            let Some((r, infeas)) = leave else {
                return Outcome::Optimal;
            };
            let p = self.basic[r];
            let to_upper = self.x[p] > self.upper[p];
            let s = if to_upper { 1.0 } else { -1.0 };
            let target = if to_upper { self.upper[p] } else { self.lower[p] };

            let mut e_r = vec![0.0; self.m];
            e_r[r] = 1.0;
            let rho = self.factor.btran(&e_r);
            let y = self.duals(&self.basic_costs());

            // (breakpoint, column, alpha_rj)
            let mut cands: Vec<(f64, usize, f64)> = Vec::new();
            for j in 0..self.n + self.m {
                if self.status[j] == VarStatus::Basic || self.is_fixed(j) {
                    continue;
                }
                let arj = self.dot_col(j, &rho);
                if arj.abs() <= PIVOT_TOL {
                    continue;
                }
                let beta = s * arj;
                let d = self.cost[j] - self.dot_col(j, &y);
                let t = match self.status[j] {
                    VarStatus::AtLower if beta > 0.0 => d.max(0.0) / beta,
                    VarStatus::AtUpper if beta < 0.0 => d.min(0.0) / beta,
                    VarStatus::FreeZero => d.abs() / beta.abs(),
                    _ => continue,
                };
                cands.push((t, j, arj));
            }
            if cands.is_empty() {
                return Outcome::Infeasible(rho.iter().map(|v| s * v).collect());
            }
            cands.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| {
                        if self.bland {
                            a.1.cmp(&b.1)
                        } else {
                            b.2.abs()
                                .partial_cmp(&a.2.abs())
                                .unwrap_or(std::cmp::Ordering::Equal)
                                .then(a.1.cmp(&b.1))
                        }
                    })
            });

            // Bound-flipping walk over the sorted breakpoints.
            let mut slope = infeas;
            let mut flips: Vec<usize> = Vec::new();
            let mut entering = None;
            for &(t, j, arj) in &cands {
                let range = self.upper[j] - self.lower[j];
                if !self.bland && range.is_finite() && slope - arj.abs() * range > 0.0 {
                    slope -= arj.abs() * range;
                    flips.push(j);
                } else {
                    entering = Some((t, j));
                    break;
                }
            }
            let Some((t_enter, q)) = entering else {
                return Outcome::Infeasible(rho.iter().map(|v| s * v).collect());
            };

            if !flips.is_empty() {
                let mut delta = vec![0.0; self.m];
                for &j in &flips {
                    let (from, to, new_status) = match self.status[j] {
                        VarStatus::AtLower => (self.lower[j], self.upper[j], VarStatus::AtUpper),
                        _ => (self.upper[j], self.lower[j], VarStatus::AtLower),
                    };
                    self.status[j] = new_status;
                    self.x[j] = to;
                    for &(i, a) in self.col(j) {
                        delta[i] += a * (to - from);
                    }
                }
                let dx = self.factor.ftran(&delta);
                for (t, &j) in self.basic.iter().enumerate() {
                    self.x[j] -= dx[t];
                }
            }

            let alpha = self.factor.ftran(&self.scatter_col(q));
            let pivot = alpha[r];
            if pivot.abs() <= PIVOT_TOL {
                // Row and column computations disagree; refresh the factorization and retry.
                self.refactor();
                self.after_pivot(0.0);
                continue;
            }
            let theta_p = (self.x[p] - target) / pivot;
            for (t, &j) in self.basic.iter().enumerate() {
                self.x[j] -= theta_p * alpha[t];
            }
            self.x[q] += theta_p;
            self.x[p] = target;
            let leaving_status = if to_upper {
                VarStatus::AtUpper
            } else {
                VarStatus::AtLower
            };
            self.replace_basic(r, q, &alpha, leaving_status);
            self.after_pivot(t_enter);
        }
    }

    // ----- results --------------------------------------------------------------------

    fn check_optimal(&mut self) -> (bool, bool) {
        self.refactor();
        let primal_ok = self
            .basic
            .iter()
            .all(|&j| self.infeasibility(j) <= self.opts.tol_feas * 0.5);
        let d = self.reduced_costs();
        let tol = self.opts.tol_opt;
        let dual_ok = (0..self.n + self.m).all(|j| {
            if self.is_fixed(j) {
                return true;
            }
            match self.status[j] {
                VarStatus::Basic => true,
                VarStatus::AtLower => d[j] >= -tol,
                VarStatus::AtUpper => d[j] <= tol,
                VarStatus::FreeZero => d[j].abs() <= tol,
            }
        });
        (primal_ok, dual_ok)
    }

    fn finish(
        self,
        status: SimplexStatus,
        clock: &Clock,
        ray: Option<Vec<f64>>,
        farkas: Option<Vec<f64>>,
    ) -> SimplexResult {
        let (time_phase1, time_phase2) = clock.split();
        let z = self.x[..self.n].to_vec();
        let objective = self.std.objective(&z);
        let reduced_costs = self.reduced_costs();
        SimplexResult {
            status,
            z,
            objective,
            basis: Basis {
                basic: self.basic,
                status: self.status,
            },
            iters_phase1: self.iters_phase1,
            iters_phase2: self.iters_phase2,
            time_phase1,
            time_phase2,
            degenerate_pivots: self.degenerate_total,
            refactorizations: self.refactorizations,
            ray,
            farkas,
            reduced_costs,
            trace: self.trace,
        }
    }

    fn run_primal(mut self, mut clock: Clock) -> SimplexResult {
        for _ in 0..MAX_CLEANUPS {
            match self.primal(&mut clock) {
                Outcome::Optimal => {
                    let (p, d) = self.check_optimal();
                    if p && d {
                        return self.finish(SimplexStatus::Optimal, &clock, None, None);
                    }
                    debug!("primal optimum failed verification (primal {p}, dual {d}); continuing");
                }
                Outcome::Infeasible(y) => {
                    self.refactor();
                    let still = self.basic.iter().any(|&j| self.infeasibility(j) > 0.0);
                    if still {
                        return self.finish(SimplexStatus::PrimalInfeasible, &clock, None, Some(y));
                    }
                }
                Outcome::Unbounded(ray) => return self.finish(SimplexStatus::Unbounded, &clock, Some(ray), None),
                Outcome::IterationLimit => return self.finish(SimplexStatus::IterationLimit, &clock, None, None),
            }
        }
        self.finish(SimplexStatus::NumericalFailure, &clock, None, None)
    }
}

/// Primal simplex from `start` (or a crash basis): composite Phase I on bound violations,
/// then Phase II.
pub fn primal_solve(std: &StandardLP, start: Option<&Basis>, opts: &SimplexOptions) -> SimplexResult {
    let clock = Clock::new();
    let engine = Engine::new(std, start, opts);
    engine.run_primal(clock)
}

/// Dual simplex with bound-flipping ratio test, warm-started from `start`. A start that is not
/// dual feasible is repaired by an auxiliary-bound dual Phase I whose time is booked as Phase I.
pub fn dual_solve(std: &StandardLP, start: &Basis, opts: &SimplexOptions) -> SimplexResult {
    let mut clock = Clock::new();
    let mut engine = Engine::new(std, Some(start), opts);
    if !engine.make_dual_feasible() {
        let ok = engine.dual_phase1();
        clock.end_phase1();
        if !ok {
            debug!("dual phase I could not reach dual feasibility; falling back to primal");
            return engine.run_primal(clock);
        }
    } else {
        clock.end_phase1();
    }
    for _ in 0..MAX_CLEANUPS {
        match engine.dual() {
            Outcome::Optimal => {
                let (p, d) = engine.check_optimal();
                if p && d {
                    return engine.finish(SimplexStatus::Optimal, &clock, None, None);
                }
                if !d {
                    debug!("dual optimum lost dual feasibility; primal cleanup");
                    return engine.run_primal(clock);
                }
            }
            Outcome::Infeasible(_) => {
                // The BFRT walk trusts the current basic values; after many flips they can drift
                // enough to fake an unbounded dual ray. Primal Phase I has the final word.
                debug!("dual ratio test found no entering column; confirming with primal");
                return engine.run_primal(clock);
            }
            Outcome::Unbounded(_) => unreachable!("the dual loop never reports an unbounded primal"),
            Outcome::IterationLimit => return engine.finish(SimplexStatus::IterationLimit, &clock, None, None),
        }
    }
    engine.finish(SimplexStatus::NumericalFailure, &clock, None, None)
}
