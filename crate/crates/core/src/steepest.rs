//! The steepest-direction subproblem
//!
//! ```text
//! min c.x  s.t.  A x = 0,  B x - y+ + y- = 0,  sum(y+) + sum(y-) = 1,
//!                x free,  0 <= y+_i <= u_i,  0 <= y-_i <= 1
//! ```
//!
//! with `u_i = 0` exactly on the rows active at the current point. Moving to a new point only
//! changes those upper bounds, so the previous optimal basis stays dual feasible.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, active_rows, check_feasible, ActiveSet, Direction, GeneralFormLP, Point, Tolerances};
use crate::simplex::{dual_solve, primal_solve, Basis, SimplexOptions, SimplexResult, SimplexStatus, StandardLP};
use crate::sparse::SparseMatrix;

/// How each subproblem is re-solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveMode {
    /// Dual simplex from the previous optimal basis.
    DualWarm,
    /// Dual simplex from a fresh slack basis every time.
    DualCold,
    /// Primal simplex from the previous optimal basis.
    PrimalWarm,
}

impl SolveMode {
    pub const ALL: [SolveMode; 3] = [SolveMode::DualWarm, SolveMode::DualCold, SolveMode::PrimalWarm];

    pub fn as_str(self) -> &'static str {
        match self {
            SolveMode::DualWarm => "dual-warm",
            SolveMode::DualCold => "dual-cold",
            SolveMode::PrimalWarm => "primal-warm",
        }
    }
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolveMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SolveMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown mode '{s}' (expected dual-warm, dual-cold or primal-warm)"))
    }
}

/// Pairs of inequality rows with `B_j = -B_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionMap {
    /// `(j, k)` with `j < k`; row `j` is retained.
    pub pairs: Vec<(usize, usize)>,
}

impl ReductionMap {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Partner row `k` of retained row `j`, if any.
    pub fn partner_of(&self, j: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == j).map(|p| p.1)
    }

    pub fn is_dropped(&self, k: usize) -> bool {
        self.pairs.iter().any(|p| p.1 == k)
    }
}

/// Finds negated row pairs, exactly on integral data and within `1e-12` relative otherwise.
/// Each row joins at most one pair; earlier rows are matched first.
pub fn reduce_parallel_facets(lp: &GeneralFormLP) -> ReductionMap {
    let bm = lp.ineq_matrix();
    let exact = lp.is_integral();
    let mut by_pattern: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for r in 0..bm.rows() {
        by_pattern
            .entry(bm.row(r).map(|(c, _)| c).collect())
            .or_default()
            .push(r);
    }
    let negated = |j: usize, k: usize| -> bool {
        let scale = bm.row_inf_norm(j).max(bm.row_inf_norm(k));
        bm.row(j).zip(bm.row(k)).all(
            |((_, a), (_, b))| {
                if exact {
                    a == -b
                } else {
                    (a + b).abs() <= 1e-12 * scale
                }
            },
        )
    };
    let mut used = vec![false; bm.rows()];
    let mut pairs = Vec::new();
    for j in 0..bm.rows() {
        if used[j] {
            continue;
        }
        let pattern: Vec<usize> = bm.row(j).map(|(c, _)| c).collect();
        if let Some(&k) = by_pattern[&pattern]
            .iter()
            .find(|&&k| k > j && !used[k] && negated(j, k))
        {
            used[j] = true;
            used[k] = true;
            pairs.push((j, k));
        }
    }
    pairs.sort_unstable();
    ReductionMap { pairs }
}

/// One upper-bound change on a `y` column.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundChange {
    /// Inequality row the bound belongs to.
    pub row: usize,
    /// `true` for `y+`, `false` for `y-` (only in the reduced model).
    pub plus: bool,
    pub from: f64,
    pub to: f64,
}

/// Output of one subproblem solve.
#[derive(Clone, Debug)]
pub struct DirectionSolve {
    pub direction: Direction,
    /// Optimal value of the subproblem (not the steepness).
    pub subproblem_objective: f64,
    pub result: SimplexResult,
    /// Whether the solve started from a cached basis.
    pub warm: bool,
}

impl DirectionSolve {
    /// The subproblem certifies that no improving direction exists.
    pub fn is_optimal_certificate(&self, lp: &GeneralFormLP, tol_term: f64) -> bool {
        self.subproblem_objective >= -tol_term * (1.0 + lp::inf_norm(lp.c()))
    }
}

#[derive(Clone, Debug)]
pub struct SteepestLP {
    n: usize,
    m_eq: usize,
    /// Inequality rows that own a `(y+, y-)` pair, in order.
    kept: Vec<usize>,
    /// Position in `kept` per inequality row, `None` for dropped rows.
    slot: Vec<Option<usize>>,
    reduction: ReductionMap,
    std: StandardLP,
    active: ActiveSet,
    basis: Option<Basis>,
    tol: Tolerances,
    solves: usize,
}

impl SteepestLP {
    fn yplus(&self, p: usize) -> usize {
        self.n + p
    }

    fn yminus(&self, p: usize) -> usize {
        self.n + self.kept.len() + p
    }

    pub fn std(&self) -> &StandardLP {
        &self.std
    }

    pub fn active(&self) -> &ActiveSet {
        &self.active
    }

    pub fn basis(&self) -> Option<&Basis> {
        self.basis.as_ref()
    }

    pub fn reduction(&self) -> &ReductionMap {
        &self.reduction
    }

    pub fn num_vars(&self) -> usize {
        self.std.num_cols()
    }

    pub fn num_rows(&self) -> usize {
        self.std.num_rows()
    }

    pub fn solves(&self) -> usize {
        self.solves
    }

    /// Current `u(y+)` per inequality row (`None` for rows dropped by the reduction).
    pub fn upper_plus(&self) -> Vec<Option<f64>> {
        self.slot
            .iter()
            .map(|s| s.map(|p| self.std.upper()[self.yplus(p)]))
            .collect()
    }

    /// Supplies a basis for the first solve. No heuristic produces one; this is the extension point.
    pub fn set_warm_start(&mut self, basis: Basis) {
        self.basis = Some(basis);
    }

    /// Target upper bounds `(u(y+_p), u(y-_p))` for slot `p` under an active set.
    fn bounds_for(&self, p: usize, active: &ActiveSet) -> (f64, f64) {
        let j = self.kept[p];
        let up = if active.contains(j) { 0.0 } else { 1.0 };
        let um = match self.reduction.partner_of(j) {
            Some(k) if active.contains(k) => 0.0,
            _ => 1.0,
        };
        (up, um)
    }

    /// `u(y+_i) = 0` exactly on active rows, and `u(y-_j) = 0` exactly when a dropped partner is active.
    pub fn bound_state_consistent(&self, active: &ActiveSet) -> bool {
        (0..self.kept.len()).all(|p| {
            let (up, um) = self.bounds_for(p, active);
            self.std.upper()[self.yplus(p)] == up && self.std.upper()[self.yminus(p)] == um
        })
    }

    /// Solves the subproblem and extracts the direction. The first call is always cold unless a
    /// basis was supplied through [`SteepestLP::set_warm_start`].
    pub fn solve_direction(
        &mut self,
        lp: &GeneralFormLP,
        mode: SolveMode,
        opts: &SimplexOptions,
    ) -> Result<DirectionSolve> {
        let warm_basis = match mode {
            SolveMode::DualCold => None,
            _ => self.basis.clone(),
        };
        let warm = warm_basis.is_some();
        let result = match (mode, warm_basis) {
            (SolveMode::PrimalWarm, start) => primal_solve(&self.std, start.as_ref(), opts),
            (_, Some(b)) => dual_solve(&self.std, &b, opts),
            (_, None) => dual_solve(&self.std, &Basis::crash(&self.std), opts),
        };
        self.solves += 1;
        match result.status {
            SimplexStatus::Optimal => {}
            SimplexStatus::Unbounded => {
                let ray = result.ray.as_ref().map(|r| r[..self.n].to_vec()).unwrap_or_default();
                return Err(Error::OriginalUnboundedInLineality { ray });
            }
            SimplexStatus::PrimalInfeasible => {
                return Err(Error::Numerical("steepest subproblem reported infeasible".into()));
            }
            other => return Err(Error::Numerical(format!("steepest subproblem ended with {other:?}"))),
        }
        self.basis = Some(result.basis.clone());
        let z = &result.z;
        let x = z[..self.n].to_vec();
        // A basic solution without y+_i y-_i > 0 is a vertex of the cone section.
        let complementary = (0..self.kept.len()).all(|p| z[self.yplus(p)].min(z[self.yminus(p)]) <= self.tol.feas);
        let direction = Direction::new(lp, x, complementary, self.tol.zero)?;
        let rate = direction.objective_rate(lp);
        if direction.by_one_norm() <= self.tol.zero && rate < -self.tol.term * (1.0 + lp::inf_norm(lp.c())) {
            return Err(Error::OriginalUnboundedInLineality { ray: direction.y });
        }
        Ok(DirectionSolve {
            direction,
            subproblem_objective: result.objective,
            result,
            warm,
        })
    }

    /// Re-derives the active set at `x_new` and flips the affected upper bounds.
    pub fn update_active_bounds(
        &mut self,
        lp: &GeneralFormLP,
        x_new: &Point,
        tol_act: f64,
    ) -> Result<Vec<BoundChange>> {
        let active = active_rows(lp, x_new, tol_act)?;
        let mut changes = Vec::new();
        for p in 0..self.kept.len() {
            let (up, um) = self.bounds_for(p, &active);
            let (jp, jm) = (self.yplus(p), self.yminus(p));
            let (cp, cm) = (self.std.upper()[jp], self.std.upper()[jm]);
            if cp != up {
                self.std.set_upper(jp, up);
                changes.push(BoundChange {
                    row: self.kept[p],
                    plus: true,
                    from: cp,
                    to: up,
                });
            }
            if cm != um {
                self.std.set_upper(jm, um);
                changes.push(BoundChange {
                    row: self.reduction.partner_of(self.kept[p]).unwrap_or(self.kept[p]),
                    plus: false,
                    from: cm,
                    to: um,
                });
            }
        }
        self.active = active;
        Ok(changes)
    }
}

/// Builds the subproblem at `x0`, optionally merging negated row pairs.
pub fn build_steepest(lp: &GeneralFormLP, x0: &Point, tol: &Tolerances, reduce: bool) -> Result<SteepestLP> {
    tol.validate()?;
    let (point, feasible) = check_feasible(lp, &x0.x, tol.feas)?;
    if !feasible {
        return Err(Error::InfeasiblePoint {
            eq_residual: point.eq_residual,
            min_slack: point.min_slack(),
        });
    }
    let reduction = if reduce {
        reduce_parallel_facets(lp)
    } else {
        ReductionMap::default()
    };
    let n = lp.n();
    let m_eq = lp.m_eq();
    let m_b = lp.m_ineq();
    let kept: Vec<usize> = (0..m_b).filter(|&i| !reduction.is_dropped(i)).collect();
    let mut slot = vec![None; m_b];
    for (p, &i) in kept.iter().enumerate() {
        slot[i] = Some(p);
    }
    let r = kept.len();
    let cols = n + 2 * r;
    let norm_row = m_eq + r;
    let mut trip = lp.eq_matrix().triplets();
    let bm = lp.ineq_matrix();
    for (p, &i) in kept.iter().enumerate() {
        trip.extend(bm.row(i).map(|(c, v)| (m_eq + p, c, v)));
        let weight = if reduction.partner_of(i).is_some() { 2.0 } else { 1.0 };
        trip.push((m_eq + p, n + p, -1.0));
        trip.push((m_eq + p, n + r + p, 1.0));
        trip.push((norm_row, n + p, weight));
        trip.push((norm_row, n + r + p, weight));
    }
    let e = SparseMatrix::from_triplets(m_eq + r + 1, cols, &trip);
    let mut q = lp.c().to_vec();
    q.resize(cols, 0.0);
    let mut f = vec![0.0; m_eq + r];
    f.push(1.0);
    let mut l = vec![f64::NEG_INFINITY; n];
    l.resize(cols, 0.0);
    let mut u = vec![f64::INFINITY; n];
    u.resize(cols, 1.0);
    let std = StandardLP::new(q, &e, f, l, u)?;
    let mut s = SteepestLP {
        n,
        m_eq,
        kept,
        slot,
        reduction,
        std,
        active: ActiveSet::default(),
        basis: None,
        tol: *tol,
        solves: 0,
    };
    s.update_active_bounds(lp, &point, tol.act)?;
    Ok(s)
}

impl SteepestLP {
    /// Number of equality rows of the original problem carried as `A x = 0`.
    pub fn m_eq(&self) -> usize {
        self.m_eq
    }
}
