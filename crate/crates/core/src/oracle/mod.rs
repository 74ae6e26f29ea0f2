//! Exact brute-force circuit oracle for desk-scale polyhedra.
//!
//! Everything here is rational arithmetic over arbitrary-precision integers; float inputs are
//! rationalized by continued fractions. Exponential by construction, meant for cross-checks.

pub mod rational;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::GeneralFormLP;
use crate::par::{self, Execution};
use rational::{dot, int_to_q, kernel, mat_vec, one_norm, rank, rationalize, solve_unique, to_coprime_integers, Q};

/// Tolerance for rationalizing float data.
pub const RATIONALIZE_TOL: f64 = 1e-12;
/// Largest number of row subsets the enumerators will visit.
pub const MAX_SUBSETS: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Circuit {
    /// Coprime integer kernel vector of `A`.
    pub g: Vec<BigInt>,
    /// Exact image `B g`.
    pub bg: Vec<Q>,
}

impl Circuit {
    fn canonical(g: Vec<BigInt>, bg: Vec<Q>) -> Circuit {
        let flip = bg.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative());
        if flip {
            Circuit { g, bg }.negated()
        } else {
            Circuit { g, bg }
        }
    }

    pub fn negated(&self) -> Circuit {
        Circuit {
            g: self.g.iter().map(|v| -v).collect(),
            bg: self.bg.iter().map(|v| -v).collect(),
        }
    }

    pub fn g_rational(&self) -> Vec<Q> {
        int_to_q(&self.g)
    }

    pub fn g_f64(&self) -> Vec<f64> {
        self.g_rational().iter().map(rational::to_f64).collect()
    }

    pub fn support(&self) -> Vec<usize> {
        self.bg
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// `c.g / ||Bg||_1`.
    pub fn ratio(&self, c: &[Q]) -> Q {
        dot(c, &self.g_rational()) / one_norm(&self.bg)
    }
}

#[derive(Clone, Debug)]
pub struct SteepestReport {
    /// Exact minimum ratio over strictly feasible signed circuits, `None` if there are none.
    pub min_ratio: Option<Q>,
    /// Signed circuits attaining the minimum.
    pub argmin: Vec<Circuit>,
    pub feasible: usize,
}

impl SteepestReport {
    /// No strictly feasible circuit improves the objective.
    pub fn is_optimal(&self) -> bool {
        self.min_ratio.as_ref().is_none_or(|r| !r.is_negative())
    }

    pub fn min_ratio_f64(&self) -> Option<f64> {
        self.min_ratio.as_ref().map(rational::to_f64)
    }
}

#[derive(Clone, Debug)]
pub struct ConformalDecomposition {
    /// Pairs `(lambda_j, g_j)` with `lambda_j > 0` and `g_j` a signed circuit.
    pub terms: Vec<(Q, Circuit)>,
}

impl ConformalDecomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn reconstruct(&self, n: usize) -> Vec<Q> {
        let mut y = vec![Q::zero(); n];
        for (lambda, c) in &self.terms {
            for (yi, gi) in y.iter_mut().zip(&c.g) {
                *yi += lambda * Q::from_integer(gi.clone());
            }
        }
        y
    }
}

#[derive(Clone, Debug)]
pub struct VertexOptimum {
    pub x: Vec<Q>,
    pub objective: Q,
    /// Number of distinct feasible vertices seen.
    pub vertices: usize,
}

/// Exact copy of an LP together with its circuit set.
#[derive(Clone, Debug)]
pub struct CircuitOracle {
    n: usize,
    a: Vec<Vec<Q>>,
    b: Vec<Q>,
    bm: Vec<Vec<Q>>,
    d: Vec<Q>,
    c: Vec<Q>,
    rank_a: usize,
    /// Kernel basis of `A` from RREF: identity on `free` coordinates.
    ker: Vec<Vec<Q>>,
    free: Vec<usize>,
    circuits: Vec<Circuit>,
}

fn rationalize_rows(rows: &[Vec<f64>]) -> Vec<Vec<Q>> {
    rows.iter().map(|r| rationalize_vec(r)).collect()
}

pub fn rationalize_vec(v: &[f64]) -> Vec<Q> {
    v.iter().map(|x| rationalize(*x, RATIONALIZE_TOL)).collect()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn guard(n: usize, k: usize, what: &str) -> Result<()> {
    let count = binomial(n, k);
    if count > MAX_SUBSETS {
        return Err(Error::OracleLimit(format!(
            "{what}: C({n}, {k}) = {count} subsets exceeds {MAX_SUBSETS}"
        )));
    }
    Ok(())
}

impl CircuitOracle {
    pub fn new(lp: &GeneralFormLP, exec: Execution) -> Result<Self> {
        let n = lp.n();
        let a = rationalize_rows(&lp.eq_matrix().to_dense());
        let bm = rationalize_rows(&lp.ineq_matrix().to_dense());
        let rank_a = rank(&a, n);
        let mut stacked = a.clone();
        stacked.extend(bm.iter().cloned());
        if rank(&stacked, n) < n {
            return Err(Error::InvalidProblem(
                "oracle requires a trivial lineality space (rank [A; B] = n)".into(),
            ));
        }
        let ker = kernel(&a, n);
        let free: Vec<usize> = {
            let mut w = a.clone();
            let pivots = rational::rref(&mut w, n);
            (0..n).filter(|c| !pivots.contains(c)).collect()
        };
        let mut oracle = CircuitOracle {
            n,
            a,
            b: rationalize_vec(lp.eq_rhs()),
            bm,
            d: rationalize_vec(lp.ineq_rhs()),
            c: rationalize_vec(lp.c()),
            rank_a,
            ker,
            free,
            circuits: Vec::new(),
        };
        oracle.circuits = oracle.enumerate(exec)?;
        Ok(oracle)
    }

    fn enumerate(&self, exec: Execution) -> Result<Vec<Circuit>> {
        let k = self.ker.len();
        if k == 0 {
            return Ok(Vec::new());
        }
        let m = self.bm.len();
        guard(m, k - 1, "circuit enumeration")?;
        // B restricted to ker(A), in kernel coordinates: row i is (B_i . K_j)_j.
        let bk: Vec<Vec<Q>> = self
            .bm
            .iter()
            .map(|row| self.ker.iter().map(|kv| dot(row, kv)).collect())
            .collect();
        let subsets = combinations(m, k - 1);
        let found = par::map(exec, &subsets, |t| {
            let rows: Vec<Vec<Q>> = t.iter().map(|&i| bk[i].clone()).collect();
            let h = kernel(&rows, k);
            if h.len() != 1 {
                return None;
            }
            let g = self.lift_kernel_coords(&h[0]);
            let g = to_coprime_integers(&g);
            let bg = mat_vec(&self.bm, &int_to_q(&g));
            Some(Circuit::canonical(g, bg))
        });
        let candidates: BTreeSet<Circuit> = found.into_iter().flatten().collect();
        let candidates: Vec<Circuit> = candidates.into_iter().collect();
        let supports: Vec<BTreeSet<usize>> = candidates.iter().map(|c| c.support().into_iter().collect()).collect();
        let keep = par::map(exec, &supports, |s| {
            !s.is_empty()
                && !supports
                    .iter()
                    .any(|o| !o.is_empty() && o.len() < s.len() && o.is_subset(s))
        });
        Ok(candidates
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(c, _)| c)
            .collect())
    }

    fn lift_kernel_coords(&self, h: &[Q]) -> Vec<Q> {
        let mut g = vec![Q::zero(); self.n];
        for (hj, kv) in h.iter().zip(&self.ker) {
            for (gi, ki) in g.iter_mut().zip(kv) {
                *gi += hj * ki;
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank_a(&self) -> usize {
        self.rank_a
    }

    /// `n - rank A`, the computable upper bound on `dim P` used by the iteration bound.
    pub fn kernel_dim(&self) -> usize {
        self.n - self.rank_a
    }

    /// Circuit lines, one canonical orientation each, sorted.
    pub fn circuits(&self) -> &[Circuit] {
        &self.circuits
    }

    pub fn objective(&self) -> &[Q] {
        &self.c
    }

    pub fn signed_circuits(&self) -> impl Iterator<Item = Circuit> + '_ {
        self.circuits.iter().flat_map(|c| [c.clone(), c.negated()])
    }

    /// Distinct values of `c.g / ||Bg||_1` over both orientations of every circuit.
    pub fn distinct_ratios(&self) -> BTreeSet<Q> {
        self.signed_circuits().map(|c| c.ratio(&self.c)).collect()
    }

    /// `(n - rank A) * |distinct ratios|`.
    pub fn iteration_bound(&self) -> usize {
        self.kernel_dim() * self.distinct_ratios().len()
    }

    /// Whether `g` (either orientation) is one of the circuits.
    pub fn contains(&self, g: &[BigInt]) -> bool {
        let neg: Vec<BigInt> = g.iter().map(|v| -v).collect();
        self.circuits.iter().any(|c| c.g == g || c.g == neg)
    }

    /// The signed circuit parallel to `y` (positive multiple), if any, judged in floats.
    pub fn identify(&self, y: &[f64], tol: f64) -> Option<Circuit> {
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ny == 0.0 {
            return None;
        }
        self.signed_circuits().find(|c| {
            let g = c.g_f64();
            let ng = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let cos = g.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / (ng * ny);
            cos > 1.0 - tol
        })
    }

    /// Exact minimum steepness over signed circuits with `(Bg)_i <= 0` on `active` rows.
    pub fn steepest_at(&self, active: &[usize]) -> SteepestReport {
        let mut min_ratio: Option<Q> = None;
        let mut argmin = Vec::new();
        let mut feasible = 0;
        for c in self.signed_circuits() {
            if active.iter().any(|&i| c.bg[i].is_positive()) {
                continue;
            }
            feasible += 1;
            let r = c.ratio(&self.c);
            match &min_ratio {
                Some(m) if r > *m => {}
                Some(m) if r == *m => argmin.push(c),
                _ => {
                    min_ratio = Some(r);
                    argmin = vec![c];
                }
            }
        }
        SteepestReport {
            min_ratio,
            argmin,
            feasible,
        }
    }

    /// Maps a float direction onto an exact kernel vector by rationalizing its free coordinates.
    pub fn snap_to_kernel(&self, y: &[f64]) -> Vec<Q> {
        let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return vec![Q::zero(); self.n];
        }
        let h: Vec<Q> = self
            .free
            .iter()
            .map(|&j| rationalize(y[j] / scale, RATIONALIZE_TOL))
            .collect();
        self.lift_kernel_coords(&h)
    }

    /// Greedy conformal decomposition of an exact kernel vector, reduced to at most
    /// `n - rank A` terms.
    pub fn decompose(&self, y: &[Q]) -> Result<ConformalDecomposition> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "direction",
                expected: self.n,
                found: y.len(),
            });
        }
        if mat_vec(&self.a, y).iter().any(|v| !v.is_zero()) {
            return Err(Error::InvalidProblem("direction is not in ker(A)".into()));
        }
        let mut r = y.to_vec();
        let mut terms: Vec<(Q, Circuit)> = Vec::new();
        loop {
            let br = mat_vec(&self.bm, &r);
            if br.iter().all(|v| v.is_zero()) {
                if r.iter().any(|v| !v.is_zero()) {
                    return Err(Error::Numerical("decomposition residual in lineality space".into()));
                }
                break;
            }
            let pick = self.signed_circuits().find(|c| {
                c.bg.iter()
                    .zip(&br)
                    .all(|(gi, ri)| gi.is_zero() || (!ri.is_zero() && gi.is_positive() == ri.is_positive()))
            });
            let Some(c) = pick else {
                return Err(Error::Numerical("no conformal circuit for residual".into()));
            };
            let lambda =
                c.bg.iter()
                    .zip(&br)
                    .filter(|(gi, _)| !gi.is_zero())
                    .map(|(gi, ri)| ri / gi)
                    .min()
                    .expect("nonempty support");
            for (ri, gi) in r.iter_mut().zip(&c.g) {
                *ri -= &lambda * Q::from_integer(gi.clone());
            }
            terms.push((lambda, c));
        }
        let terms = self.caratheodory(terms)?;
        let dec = ConformalDecomposition { terms };
        if dec.reconstruct(self.n) != y {
            return Err(Error::Numerical(
                "conformal decomposition does not reconstruct y".into(),
            ));
        }
        Ok(dec)
    }

    fn caratheodory(&self, mut terms: Vec<(Q, Circuit)>) -> Result<Vec<(Q, Circuit)>> {
        while terms.len() > self.kernel_dim() {
            let t = terms.len();
            let m: Vec<Vec<Q>> = (0..self.n)
                .map(|i| terms.iter().map(|(_, c)| Q::from_integer(c.g[i].clone())).collect())
                .collect();
            let deps = kernel(&m, t);
            let Some(mut mu) = deps.into_iter().next() else {
                return Err(Error::Numerical("expected dependent circuits".into()));
            };
            if !mu.iter().any(|v| v.is_positive()) {
                mu.iter_mut().for_each(|v| *v = -v.clone());
            }
            let theta = terms
                .iter()
                .zip(&mu)
                .filter(|(_, m)| m.is_positive())
                .map(|((l, _), m)| l / m)
                .min()
                .expect("some positive entry");
            for ((l, _), m) in terms.iter_mut().zip(&mu) {
                *l -= &theta * m;
            }
            terms.retain(|(l, _)| l.is_positive());
        }
        Ok(terms)
    }

    /// Exact optimum by enumerating basic feasible points.
    pub fn brute_force_optimum(&self) -> Result<VertexOptimum> {
        let k = self.kernel_dim();
        let m = self.bm.len();
        guard(m, k, "vertex enumeration")?;
        let subsets = combinations(m, k);
        let candidates = par::map(Execution::Parallel, &subsets, |t| {
            let mut rows = self.a.clone();
            let mut rhs = self.b.clone();
            for &i in t {
                rows.push(self.bm[i].clone());
                rhs.push(self.d[i].clone());
            }
            let x = solve_unique(&rows, &rhs, self.n)?;
            let bx = mat_vec(&self.bm, &x);
            bx.iter().zip(&self.d).all(|(l, r)| l <= r).then_some(x)
        });
        let vertices: BTreeSet<Vec<Q>> = candidates.into_iter().flatten().collect();
        let best = vertices
            .iter()
            .min_by(|x, y| dot(&self.c, x).cmp(&dot(&self.c, y)))
            .cloned()
            .ok_or(Error::Infeasible)?;
        let bx = mat_vec(&self.bm, &best);
        let active: Vec<usize> = (0..m).filter(|&i| bx[i] == self.d[i]).collect();
        let report = self.steepest_at(&active);
        if let Some(c) = report.argmin.first().filter(|_| !report.is_optimal()) {
            return Err(Error::Unbounded { ray: c.g_f64() });
        }
        Ok(VertexOptimum {
            objective: dot(&self.c, &best),
            x: best,
            vertices: vertices.len(),
        })
    }

    /// Bounded iff no signed circuit has `Bg <= 0` (given trivial lineality).
    pub fn has_recession_circuit(&self) -> bool {
        self.signed_circuits().any(|c| c.bg.iter().all(|v| !v.is_positive()))
    }
}

pub fn enumerate_circuits(lp: &GeneralFormLP, exec: Execution) -> Result<Vec<Circuit>> {
    Ok(CircuitOracle::new(lp, exec)?.circuits)
}

/// Steepest ratio over circuits strictly feasible at `x0`, with rows within `tol_act` of
/// their right-hand side treated as active.
pub fn steepest_by_enumeration(lp: &GeneralFormLP, x0: &[f64], tol_act: f64) -> Result<SteepestReport> {
    let oracle = CircuitOracle::new(lp, Execution::Parallel)?;
    let point = crate::lp::Point::evaluate(lp, x0.to_vec())?;
    let active = crate::lp::active_rows(lp, &point, tol_act)?;
    Ok(oracle.steepest_at(&active.rows))
}

pub fn conformal_decompose(lp: &GeneralFormLP, y: &[f64]) -> Result<ConformalDecomposition> {
    let oracle = CircuitOracle::new(lp, Execution::Parallel)?;
    oracle.decompose(&rationalize_vec(y))
}

pub fn brute_force_optimum(lp: &GeneralFormLP) -> Result<VertexOptimum> {
    CircuitOracle::new(lp, Execution::Parallel)?.brute_force_optimum()
}

/// Whether the (assumed nonempty) polyhedron is bounded.
pub fn is_bounded(lp: &GeneralFormLP) -> Result<bool> {
    match CircuitOracle::new(lp, Execution::Sequential) {
        Ok(o) => Ok(!o.has_recession_circuit()),
        Err(Error::InvalidProblem(_)) => Ok(false),
        Err(e) => Err(e),
    }
}
