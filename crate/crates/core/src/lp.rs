//! Problem data model for `min c.x  s.t.  A x = b,  B x <= d`, together with the
//! feasibility/activity queries and the steepness functional shared by every other module.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::sparse::SparseMatrix;

/// Numerical tolerances shared across the scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Feasibility of residuals, scaled by `1 + ||row||_inf`.
    pub feas: f64,
    /// Absolute slack below which an inequality counts as active.
    pub act: f64,
    /// Threshold below which `||By||_1` is treated as zero.
    pub zero: f64,
    /// Termination threshold on `c.y`, relative to `1 + ||c||_inf`.
    pub term: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feas: 1e-7,
            act: 1e-7,
            zero: 1e-11,
            term: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [self.feas, self.act, self.zero, self.term];
        if all.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidProblem(format!(
                "tolerances must be positive and finite: {self:?}"
            )));
        }
        if self.act < self.feas {
            // A maximal step lands within `feas` of the blocking row; a tighter activity
            // threshold would never mark it active.
            return Err(Error::InvalidProblem(
                "activity tolerance must not be tighter than feasibility tolerance".into(),
            ));
        }
        Ok(())
    }
}

/// A linear program over `P = {x : A x = b, B x <= d}`.
#[derive(Clone, Debug)]
pub struct GeneralFormLP {
    name: String,
    c: Vec<f64>,
    a: SparseMatrix,
    b: Vec<f64>,
    bm: SparseMatrix,
    d: Vec<f64>,
}

impl GeneralFormLP {
    pub fn new(
        name: impl Into<String>,
        c: Vec<f64>,
        a: SparseMatrix,
        b: Vec<f64>,
        bm: SparseMatrix,
        d: Vec<f64>,
    ) -> Result<Self> {
        let n = c.len();
        check_len("columns of A", n, a.cols())?;
        check_len("columns of B", n, bm.cols())?;
        check_len("length of b", a.rows(), b.len())?;
        check_len("length of d", bm.rows(), d.len())?;
        if bm.rows() == 0 {
            return Err(Error::InvalidProblem("at least one inequality row is required".into()));
        }
        if let Some(r) = (0..a.rows()).find(|&r| a.row_nnz(r) == 0) {
            return Err(Error::InvalidProblem(format!("row {r} of A is zero")));
        }
        if let Some(r) = (0..bm.rows()).find(|&r| bm.row_nnz(r) == 0) {
            return Err(Error::InvalidProblem(format!("row {r} of B is zero")));
        }
        let finite = c.iter().chain(&b).chain(&d).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidProblem("non-finite data".into()));
        }
        Ok(GeneralFormLP {
            name: name.into(),
            c,
            a,
            b,
            bm,
            d,
        })
    }

    /// Convenience constructor from dense row lists.
    pub fn from_dense(
        name: impl Into<String>,
        c: Vec<f64>,
        a: &[Vec<f64>],
        b: Vec<f64>,
        bm: &[Vec<f64>],
        d: Vec<f64>,
    ) -> Result<Self> {
        let n = c.len();
        for row in a.iter().chain(bm) {
            check_len("dense row", n, row.len())?;
        }
        Self::new(
            name,
            c,
            SparseMatrix::from_dense(a, n),
            b,
            SparseMatrix::from_dense(bm, n),
            d,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn m_eq(&self) -> usize {
        self.a.rows()
    }

    pub fn m_ineq(&self) -> usize {
        self.bm.rows()
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn eq_matrix(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn eq_rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn ineq_matrix(&self) -> &SparseMatrix {
        &self.bm
    }

    pub fn ineq_rhs(&self) -> &[f64] {
        &self.d
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.c, x)
    }

    /// Same polyhedron, different objective.
    pub fn with_objective(&self, c: Vec<f64>) -> Result<Self> {
        check_len("objective", self.n(), c.len())?;
        let mut out = self.clone();
        out.c = c;
        Ok(out)
    }

    pub fn negated_objective(&self) -> Self {
        let mut out = self.clone();
        out.c.iter_mut().for_each(|v| *v = -*v);
        out
    }

    /// `d - B x`.
    pub fn ineq_slack(&self, x: &[f64]) -> Vec<f64> {
        self.bm
            .mul_vec(x)
            .into_iter()
            .zip(&self.d)
            .map(|(bx, d)| d - bx)
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integral()
            && self.bm.is_integral()
            && self.c.iter().chain(&self.b).chain(&self.d).all(|v| v.fract() == 0.0)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn one_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// A point together with its residual information.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: Vec<f64>,
    /// `max |A x - b|`.
    pub eq_residual: f64,
    /// `d - B x`.
    pub ineq_slack: Vec<f64>,
}

impl Point {
    pub fn evaluate(lp: &GeneralFormLP, x: Vec<f64>) -> Result<Self> {
        check_len("point", lp.n(), x.len())?;
        let ax = lp.a.mul_vec(&x);
        let eq_residual = ax.iter().zip(&lp.b).fold(0.0_f64, |m, (ax, b)| m.max((ax - b).abs()));
        let ineq_slack = lp.ineq_slack(&x);
        Ok(Point {
            x,
            eq_residual,
            ineq_slack,
        })
    }

    pub fn min_slack(&self) -> f64 {
        self.ineq_slack.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Sorted indices of the inequality rows that are tight at a point.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSet {
    pub rows: Vec<usize>,
}

impl ActiveSet {
    pub fn contains(&self, row: usize) -> bool {
        self.rows.binary_search(&row).is_ok()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_subset(&self, other: &ActiveSet) -> bool {
        self.rows.iter().all(|r| other.contains(*r))
    }
}

pub fn active_rows(lp: &GeneralFormLP, p: &Point, tol_act: f64) -> Result<ActiveSet> {
    check_len("point", lp.n(), p.x.len())?;
    check_len("slack vector", lp.m_ineq(), p.ineq_slack.len())?;
    let rows = p
        .ineq_slack
        .iter()
        .enumerate()
        .filter(|(_, s)| s.abs() <= tol_act)
        .map(|(i, _)| i)
        .collect();
    Ok(ActiveSet { rows })
}

/// `c.y / ||B y||_1`, or `None` when `||B y||_1 <= tol_zero`.
pub fn steepness(lp: &GeneralFormLP, y: &[f64], tol_zero: f64) -> Result<Option<f64>> {
    check_len("direction", lp.n(), y.len())?;
    let by = lp.bm.mul_vec(y);
    Ok(steepness_from_image(lp.c(), y, &by, tol_zero))
}

fn steepness_from_image(c: &[f64], y: &[f64], by: &[f64], tol_zero: f64) -> Option<f64> {
    let norm = one_norm(by);
    (norm > tol_zero).then(|| dot(c, y) / norm)
}

/// Evaluates `x` and reports whether it lies in `P` within `tol_feas`
/// (residuals scaled by `1 + ||row||_inf`).
pub fn check_feasible(lp: &GeneralFormLP, x: &[f64], tol_feas: f64) -> Result<(Point, bool)> {
    let p = Point::evaluate(lp, x.to_vec())?;
    let ax = lp.a.mul_vec(x);
    let eq_ok = (0..lp.m_eq()).all(|r| (ax[r] - lp.b[r]).abs() <= tol_feas * (1.0 + lp.a.row_inf_norm(r)));
    let ineq_ok = p
        .ineq_slack
        .iter()
        .enumerate()
        .all(|(r, s)| *s >= -tol_feas * (1.0 + lp.bm.row_inf_norm(r)));
    Ok((p, eq_ok && ineq_ok))
}

/// An augmenting direction with its cached image under `B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub y: Vec<f64>,
    pub by: Vec<f64>,
    pub steepness: Option<f64>,
    pub is_vertex_solution: bool,
}

impl Direction {
    pub fn new(lp: &GeneralFormLP, y: Vec<f64>, is_vertex_solution: bool, tol_zero: f64) -> Result<Self> {
        check_len("direction", lp.n(), y.len())?;
        let by = lp.bm.mul_vec(&y);
        let steepness = steepness_from_image(lp.c(), &y, &by, tol_zero);
        Ok(Direction {
            y,
            by,
            steepness,
            is_vertex_solution,
        })
    }

    pub fn objective_rate(&self, lp: &GeneralFormLP) -> f64 {
        dot(lp.c(), &self.y)
    }

    pub fn by_one_norm(&self) -> f64 {
        one_norm(&self.by)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use proptest::prelude::*;

    #[test]
    fn triangle_active_rows() {
        let lp = instances::triangle();
        let at = |x: Vec<f64>| active_rows(&lp, &Point::evaluate(&lp, x).unwrap(), 1e-7).unwrap().rows;
        assert_eq!(at(vec![0.0, 0.0]), vec![0, 1]);
        assert_eq!(at(vec![0.5, 0.25]), Vec::<usize>::new());
        assert_eq!(at(vec![1.0, 0.0]), vec![1, 2]);
    }

    #[test]
    fn triangle_steepness() {
        let lp = instances::triangle();
        assert_eq!(steepness(&lp, &[1.0, 0.0], 1e-11).unwrap(), Some(-1.0));
        assert_eq!(steepness(&lp, &[0.0, 1.0], 1e-11).unwrap(), Some(-0.5));
        assert_eq!(steepness(&lp, &[0.0, 0.0], 1e-11).unwrap(), None);
    }

    #[test]
    fn triangle_feasibility() {
        let lp = instances::triangle();
        let (p, ok) = check_feasible(&lp, &[0.0, 0.0], 1e-7).unwrap();
        assert!(ok);
        assert_eq!(p.ineq_slack, vec![0.0, 0.0, 1.0]);
        let (p, ok) = check_feasible(&lp, &[2.0, 0.0], 1e-7).unwrap();
        assert!(!ok);
        assert_eq!(p.ineq_slack[2], -1.0);
    }

    #[test]
    fn equality_residual_is_exact() {
        let lp = GeneralFormLP::from_dense(
            "eq",
            vec![1.0, 1.0],
            &[vec![1.0, 1.0]],
            vec![1.0],
            &[vec![-1.0, 0.0], vec![0.0, -1.0]],
            vec![0.0, 0.0],
        )
        .unwrap();
        let (p, ok) = check_feasible(&lp, &[0.5, 0.5], 1e-7).unwrap();
        assert_eq!(p.eq_residual, 0.0);
        assert!(ok);
    }

    #[test]
    fn dimension_errors() {
        let lp = instances::triangle();
        assert!(matches!(
            steepness(&lp, &[1.0], 1e-11),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(check_feasible(&lp, &[1.0, 2.0, 3.0], 1e-7).is_err());
    }

    #[test]
    fn construction_rejects_bad_shapes() {
        let no_ineq = GeneralFormLP::from_dense("x", vec![1.0], &[vec![1.0]], vec![1.0], &[], vec![]);
        assert!(matches!(no_ineq, Err(Error::InvalidProblem(_))));
        let zero_row = GeneralFormLP::from_dense("x", vec![1.0], &[], vec![], &[vec![0.0]], vec![1.0]);
        assert!(matches!(zero_row, Err(Error::InvalidProblem(_))));
        let bad_rhs = GeneralFormLP::from_dense("x", vec![1.0], &[], vec![], &[vec![1.0]], vec![1.0, 2.0]);
        assert!(matches!(bad_rhs, Err(Error::DimensionMismatch { .. })));
    }

    proptest! {
        #[test]
        fn active_rows_monotone_in_tolerance(
            x in prop::collection::vec(-0.5f64..1.5, 2),
            t1 in 1e-12f64..1.0,
            t2 in 1e-12f64..1.0,
        ) {
            let lp = instances::triangle();
            let p = Point::evaluate(&lp, x).unwrap();
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let small = active_rows(&lp, &p, lo).unwrap();
            let large = active_rows(&lp, &p, hi).unwrap();
            prop_assert!(small.is_subset(&large));
        }

        #[test]
        fn steepness_is_scale_invariant(
            y in prop::collection::vec(-10.0f64..10.0, 2),
            alpha in 1e-3f64..1e3,
        ) {
            let lp = instances::triangle();
            let base = steepness(&lp, &y, 1e-11).unwrap();
            let scaled: Vec<f64> = y.iter().map(|v| v * alpha).collect();
            let other = steepness(&lp, &scaled, 1e-11).unwrap();
            match (base, other) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs())),
                (None, None) => {}
                // Only reachable when ||By||_1 straddles the zero threshold.
                (a, b) => prop_assert!(y.iter().all(|v| v.abs() < 1e-9), "{a:?} vs {b:?}"),
            }
        }

        #[test]
        fn feasible_points_have_small_active_slacks(
            x in prop::collection::vec(0.0f64..1.0, 2),
        ) {
            let lp = instances::triangle();
            let (p, ok) = check_feasible(&lp, &x, 1e-7).unwrap();
            let act = active_rows(&lp, &p, 1e-7).unwrap();
            if ok {
                for r in act.rows {
                    prop_assert!(p.ineq_slack[r].abs() <= 1e-7);
                }
            }
        }
    }
}
