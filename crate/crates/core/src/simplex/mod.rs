//! Bounded-variable revised simplex with primal and dual pivoting and explicit basis warm starts.
//!
//! Problems are stated as `min q.z  s.t.  E z = f,  l <= z <= u`. Internally every row `i`
//! additionally owns a logical column `N + i` (a unit vector fixed to `[0, 0]`), so a basis is
//! an index list over `0..N + M` and the all-logical basis always exists.

mod engine;
mod lu;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::lp::{GeneralFormLP, Point};
use crate::sparse::SparseMatrix;

pub use engine::{dual_solve, primal_solve};

/// Default optimality (reduced cost) tolerance.
pub const TOL_OPT: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct StandardLP {
    q: Vec<f64>,
    columns: Vec<Vec<(usize, f64)>>,
    rows: usize,
    f: Vec<f64>,
    l: Vec<f64>,
    u: Vec<f64>,
}

impl StandardLP {
    pub fn new(q: Vec<f64>, e: &SparseMatrix, f: Vec<f64>, l: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        let n = q.len();
        check_len("columns of E", n, e.cols())?;
        check_len("right-hand side", e.rows(), f.len())?;
        check_len("lower bounds", n, l.len())?;
        check_len("upper bounds", n, u.len())?;
        if let Some(j) = (0..n).find(|&j| l[j] > u[j] || l[j] == f64::INFINITY || u[j] == f64::NEG_INFINITY) {
            return Err(Error::InvalidProblem(format!(
                "column {j} has inconsistent bounds [{}, {}]",
                l[j], u[j]
            )));
        }
        Ok(StandardLP {
            q,
            columns: e.columns(),
            rows: e.rows(),
            f,
            l,
            u,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.q.len()
    }

    pub fn objective_coeffs(&self) -> &[f64] {
        &self.q
    }

    pub fn rhs(&self) -> &[f64] {
        &self.f
    }

    pub fn lower(&self) -> &[f64] {
        &self.l
    }

    pub fn upper(&self) -> &[f64] {
        &self.u
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    pub fn set_upper(&mut self, j: usize, value: f64) {
        assert!(value >= self.l[j], "upper bound below lower bound");
        self.u[j] = value;
    }

    pub fn set_lower(&mut self, j: usize, value: f64) {
        assert!(value <= self.u[j], "lower bound above upper bound");
        self.l[j] = value;
    }

    pub fn set_objective(&mut self, q: Vec<f64>) {
        assert_eq!(q.len(), self.q.len());
        self.q = q;
    }

    /// `||E z - f||_inf`.
    pub fn residual(&self, z: &[f64]) -> f64 {
        let mut r: Vec<f64> = self.f.iter().map(|v| -v).collect();
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                r[i] += v * z[j];
            }
        }
        r.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn bound_violation(&self, z: &[f64]) -> f64 {
        z.iter()
            .zip(self.l.iter().zip(&self.u))
            .fold(0.0_f64, |m, (v, (l, u))| m.max(l - v).max(v - u))
    }

    pub fn objective(&self, z: &[f64]) -> f64 {
        self.q.iter().zip(z).map(|(a, b)| a * b).sum()
    }
}

/// Recovers the original variables from a computational-form solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnMap {
    pub n: usize,
}

impl ColumnMap {
    pub fn recover(&self, z: &[f64]) -> Vec<f64> {
        z[..self.n].to_vec()
    }
}

/// `A x = b, B x + s = d, s >= 0, x free`.
pub fn to_computational_form(lp: &GeneralFormLP) -> (StandardLP, ColumnMap) {
    let n = lp.n();
    let ma = lp.m_eq();
    let mb = lp.m_ineq();
    let mut triplets = lp.eq_matrix().triplets();
    triplets.extend(lp.ineq_matrix().triplets().into_iter().map(|(r, c, v)| (ma + r, c, v)));
    triplets.extend((0..mb).map(|i| (ma + i, n + i, 1.0)));
    let e = SparseMatrix::from_triplets(ma + mb, n + mb, &triplets);
    let mut q = lp.c().to_vec();
    q.resize(n + mb, 0.0);
    let f = lp.eq_rhs().iter().chain(lp.ineq_rhs()).copied().collect();
    let mut l = vec![f64::NEG_INFINITY; n];
    l.resize(n + mb, 0.0);
    let u = vec![f64::INFINITY; n + mb];
    let std = StandardLP::new(q, &e, f, l, u).expect("computational form is consistent by construction");
    (std, ColumnMap { n })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    FreeZero,
}

/// Basis over the `N + M` columns (structural followed by logical).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    /// Basic column per row position.
    pub basic: Vec<usize>,
    /// Status of every column; `Basic` exactly for the entries of `basic`.
    pub status: Vec<VarStatus>,
}

impl Basis {
    /// Slack-preferring crash basis: each row takes an unused structural column that is a
    /// unit vector in that row, falling back to the row's logical.
    pub fn crash(std: &StandardLP) -> Basis {
        let n = std.num_cols();
        let m = std.num_rows();
        let mut basic: Vec<usize> = (0..m).map(|i| n + i).collect();
        let mut status = vec![VarStatus::AtLower; n + m];
        for j in 0..n {
            status[j] = default_status(std.l[j], std.u[j]);
        }
        let mut taken = vec![false; m];
        for j in 0..n {
            if let [(i, _)] = std.column(j) {
                if !taken[*i] {
                    taken[*i] = true;
                    basic[*i] = j;
                    status[j] = VarStatus::Basic;
                }
            }
        }
        for (i, &j) in basic.iter().enumerate() {
            if j == n + i {
                status[j] = VarStatus::Basic;
            }
        }
        Basis { basic, status }
    }

    pub fn is_consistent(&self, total_cols: usize) -> bool {
        if self.status.len() != total_cols {
            return false;
        }
        let mut seen = vec![false; total_cols];
        for &j in &self.basic {
            if j >= total_cols || seen[j] || self.status[j] != VarStatus::Basic {
                return false;
            }
            seen[j] = true;
        }
        self.status.iter().filter(|s| **s == VarStatus::Basic).count() == self.basic.len()
    }
}

pub(crate) fn default_status(l: f64, u: f64) -> VarStatus {
    if l.is_finite() {
        VarStatus::AtLower
    } else if u.is_finite() {
        VarStatus::AtUpper
    } else {
        VarStatus::FreeZero
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimplexStatus {
    Optimal,
    PrimalInfeasible,
    /// Dual infeasible; with a primal feasible point this means the objective is unbounded.
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PivotRule {
    /// Dantzig pricing with a switch to Bland's rule after a run of degenerate pivots.
    DantzigWithBlandFallback,
    /// Bland's rule throughout.
    Bland,
}

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    pub pivot_rule: PivotRule,
    /// Consecutive degenerate pivots before Bland's rule takes over.
    pub bland_after: usize,
    pub refactor_every: usize,
    pub drift_tol: f64,
    pub tol_feas: f64,
    pub tol_opt: f64,
    /// `None` means `100 * (M + N)`.
    pub max_iters: Option<usize>,
    /// Record `(iteration, seconds, objective)` after every pivot.
    pub record_trace: bool,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            pivot_rule: PivotRule::DantzigWithBlandFallback,
            bland_after: 200,
            refactor_every: 64,
            drift_tol: 1e-6,
            tol_feas: 1e-7,
            tol_opt: TOL_OPT,
            max_iters: None,
            record_trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub seconds: f64,
    pub objective: f64,
}

#[derive(Clone, Debug)]
pub struct SimplexResult {
    pub status: SimplexStatus,
    /// Values of the `N` structural columns.
    pub z: Vec<f64>,
    pub objective: f64,
    pub basis: Basis,
    pub iters_phase1: usize,
    pub iters_phase2: usize,
    pub time_phase1: Duration,
    pub time_phase2: Duration,
    pub degenerate_pivots: usize,
    pub refactorizations: usize,
    /// Improving ray in `z` space when `status == Unbounded`.
    pub ray: Option<Vec<f64>>,
    /// Row multipliers certifying infeasibility when `status == PrimalInfeasible`.
    pub farkas: Option<Vec<f64>>,
    /// Reduced costs of all `N + M` columns at termination.
    pub reduced_costs: Vec<f64>,
    pub trace: Vec<TracePoint>,
}

impl SimplexResult {
    pub fn iterations(&self) -> usize {
        self.iters_phase1 + self.iters_phase2
    }

    pub fn total_time(&self) -> Duration {
        self.time_phase1 + self.time_phase2
    }
}

/// Maximum bound violation, residual and sign-inconsistent reduced cost of a result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub residual: f64,
    pub bound_violation: f64,
    pub dual_infeasibility: f64,
}

/// Recomputes the optimality certificate of a result against `std`.
pub fn certify(std: &StandardLP, result: &SimplexResult) -> Certificate {
    let n = std.num_cols();
    let mut dual_infeasibility = 0.0_f64;
    for (j, d) in result.reduced_costs.iter().enumerate().take(n) {
        let (l, u) = (std.l[j], std.u[j]);
        if l == u {
            continue;
        }
        let v = match result.basis.status[j] {
            VarStatus::Basic => d.abs(),
            VarStatus::AtLower => (-d).max(0.0),
            VarStatus::AtUpper => d.max(0.0),
            VarStatus::FreeZero => d.abs(),
        };
        dual_infeasibility = dual_infeasibility.max(v);
    }
    Certificate {
        residual: std.residual(&result.z),
        bound_violation: std.bound_violation(&result.z),
        dual_infeasibility,
    }
}

/// Primal Phase I on the computational form of `lp`: a feasible point and its basis.
pub fn phase1_feasible_point(lp: &GeneralFormLP, opts: &SimplexOptions) -> Result<(Point, Basis, SimplexResult)> {
    let (mut std, map) = to_computational_form(lp);
    std.set_objective(vec![0.0; std.num_cols()]);
    let res = primal_solve(&std, None, opts);
    match res.status {
        SimplexStatus::Optimal => {
            let x = map.recover(&res.z);
            let p = Point::evaluate(lp, x)?;
            Ok((p, res.basis.clone(), res))
        }
        SimplexStatus::PrimalInfeasible => Err(Error::Infeasible),
        other => Err(Error::Numerical(format!("phase I ended with {other:?}"))),
    }
}

#[cfg(test)]
mod tests;
