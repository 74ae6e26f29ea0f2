//! Small named polyhedra and seeded random generators used by tests, the CLI and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lp::GeneralFormLP;
use crate::oracle;
use crate::sparse::SparseMatrix;

/// `min -2x1 - x2` over the triangle `x >= 0, x1 + x2 <= 1`.
pub fn triangle() -> GeneralFormLP {
    GeneralFormLP::from_dense(
        "triangle",
        vec![-2.0, -1.0],
        &[],
        vec![],
        &[vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
        vec![0.0, 0.0, 1.0],
    )
    .expect("valid triangle")
}

/// Unit cube `[0, 1]^dim` as `x_i <= 1` rows followed by `-x_i <= 0` rows, objective `-1`.
pub fn cube(dim: usize) -> GeneralFormLP {
    let mut rows = Vec::with_capacity(2 * dim);
    let mut d = Vec::with_capacity(2 * dim);
    for sign in [1.0, -1.0] {
        for i in 0..dim {
            let mut r = vec![0.0; dim];
            r[i] = sign;
            rows.push(r);
            d.push(if sign > 0.0 { 1.0 } else { 0.0 });
        }
    }
    GeneralFormLP::from_dense(format!("cube{dim}"), vec![-1.0; dim], &[], vec![], &rows, d).expect("valid cube")
}

/// Unit square with objective `-x1`.
pub fn square() -> GeneralFormLP {
    cube(2).with_objective(vec![-1.0, 0.0]).expect("same dimension")
}

/// Box `[0,1] x [0,2]` cut by `x1 + x2 <= 2.5`; rows 0/1 and 2/3 are parallel facet pairs.
pub fn box_lp() -> GeneralFormLP {
    GeneralFormLP::from_dense(
        "box",
        vec![-1.0, -2.0],
        &[],
        vec![],
        &[
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
            vec![1.0, 1.0],
        ],
        vec![1.0, 0.0, 2.0, 0.0, 2.5],
    )
    .expect("valid box")
}

/// Square pyramid with apex `(1/2, 1/2, 1)` whose base facet `z >= 0` is listed twice.
/// The origin is a degenerate vertex (four tight rows in three dimensions).
pub fn pyramid() -> GeneralFormLP {
    GeneralFormLP::from_dense(
        "pyramid",
        vec![0.0, 0.0, -1.0],
        &[],
        vec![],
        &[
            vec![-2.0, 0.0, 1.0],
            vec![0.0, -2.0, 1.0],
            vec![2.0, 0.0, 1.0],
            vec![0.0, 2.0, 1.0],
            vec![0.0, 0.0, -1.0],
            vec![0.0, 0.0, -1.0],
        ],
        vec![0.0, 0.0, 2.0, 2.0, 0.0, 0.0],
    )
    .expect("valid pyramid")
}

/// `{x <= 0, -x <= -1}`.
pub fn infeasible_interval() -> GeneralFormLP {
    GeneralFormLP::from_dense(
        "infeasible",
        vec![1.0],
        &[],
        vec![],
        &[vec![1.0], vec![-1.0]],
        vec![0.0, -1.0],
    )
    .expect("valid interval")
}

#[derive(Clone, Copy, Debug)]
pub struct RandomPolytopeSpec {
    pub max_n: usize,
    pub max_m_ineq: usize,
    /// Integer entries are drawn from `[-coeff, coeff]`.
    pub coeff: i64,
}

impl Default for RandomPolytopeSpec {
    fn default() -> Self {
        RandomPolytopeSpec {
            max_n: 5,
            max_m_ineq: 9,
            coeff: 3,
        }
    }
}

/// A bounded, nonempty polytope with small integer data, reproducible from `seed`.
///
/// Boundedness is certified with the exact circuit oracle: a polyhedron with trivial
/// lineality is bounded iff no circuit `g` has `B g <= 0`.
pub fn random_polytope(seed: u64, spec: RandomPolytopeSpec) -> GeneralFormLP {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(2..=spec.max_n.max(2));
        let m_eq = if n >= 3 && rng.gen_bool(0.3) { 1 } else { 0 };
        let min_rows = (n + 1).min(spec.max_m_ineq);
        let m = rng.gen_range(min_rows..=spec.max_m_ineq.max(min_rows));
        let k = spec.coeff;
        let anchor: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let draw_row = |rng: &mut ChaCha8Rng| loop {
            let r: Vec<i64> = (0..n).map(|_| rng.gen_range(-k..=k)).collect();
            if r.iter().any(|v| *v != 0) {
                return r;
            }
        };
        let a: Vec<Vec<i64>> = (0..m_eq).map(|_| draw_row(&mut rng)).collect();
        let bm: Vec<Vec<i64>> = (0..m).map(|_| draw_row(&mut rng)).collect();
        let b: Vec<f64> = a.iter().map(|r| dot_i(r, &anchor) as f64).collect();
        // Zero slack on a third of the rows makes the anchor a degenerate-ish start.
        let d: Vec<f64> = bm
            .iter()
            .map(|r| (dot_i(r, &anchor) + if rng.gen_bool(0.35) { 0 } else { rng.gen_range(1..=3) }) as f64)
            .collect();
        let c: Vec<f64> = loop {
            let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-k..=k)).collect();
            if c.iter().any(|v| *v != 0) {
                break c.into_iter().map(|v| v as f64).collect();
            }
        };
        let to_f = |rows: &[Vec<i64>]| -> Vec<Vec<f64>> {
            rows.iter().map(|r| r.iter().map(|v| *v as f64).collect()).collect()
        };
        let Ok(lp) = GeneralFormLP::from_dense(format!("random-{seed}"), c, &to_f(&a), b, &to_f(&bm), d) else {
            continue;
        };
        match oracle::is_bounded(&lp) {
            Ok(true) => return lp,
            _ => continue,
        }
    }
}

fn dot_i(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sparse packing LP `min -p.x  s.t.  W x <= cap, 0 <= x <= u` with integer data.
/// The origin is feasible. Sizes in the tens give SD runs with dozens to hundreds of steps.
pub fn random_packing(seed: u64, n: usize, m: usize) -> GeneralFormLP {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::new();
    let mut d = Vec::new();
    for i in 0..m {
        let mut row_sum = 0.0;
        for j in 0..n {
            if rng.gen_bool(0.4) {
                let w = rng.gen_range(1..=9) as f64;
                triplets.push((i, j, w));
                row_sum += w;
            }
        }
        if row_sum == 0.0 {
            let j = rng.gen_range(0..n);
            triplets.push((i, j, 1.0));
            row_sum = 1.0;
        }
        d.push((row_sum * rng.gen_range(0.2..0.6_f64)).round().max(1.0));
    }
    for j in 0..n {
        triplets.push((m + j, j, 1.0));
        d.push(rng.gen_range(1..=5) as f64);
        triplets.push((m + n + j, j, -1.0));
        d.push(0.0);
    }
    let c: Vec<f64> = (0..n).map(|_| -(rng.gen_range(1..=20) as f64)).collect();
    let bm = SparseMatrix::from_triplets(m + 2 * n, n, &triplets);
    GeneralFormLP::new(
        format!("packing-{seed}-{n}x{m}"),
        c,
        SparseMatrix::zeros(0, n),
        vec![],
        bm,
        d,
    )
    .expect("valid packing instance")
}

/// Transportation problem with `s` supplies and `t` demands (balanced, equality constrained),
/// costs in `[1, 20]`. Variables are the `s * t` shipments, all nonnegative.
pub fn random_transportation(seed: u64, s: usize, t: usize) -> GeneralFormLP {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let supply: Vec<f64> = (0..s).map(|_| rng.gen_range(5..=30) as f64).collect();
    let total: f64 = supply.iter().sum();
    let mut demand: Vec<f64> = (0..t).map(|_| rng.gen_range(1..=10) as f64).collect();
    let dsum: f64 = demand.iter().sum();
    let mut acc = 0.0;
    for v in demand.iter_mut().take(t - 1) {
        *v = (*v * total / dsum).floor();
        acc += *v;
    }
    demand[t - 1] = total - acc;
    let n = s * t;
    let mut eq = Vec::new();
    for i in 0..s {
        for j in 0..t {
            eq.push((i, i * t + j, 1.0));
        }
    }
    // Last demand row is implied by the others; leave it out to keep A full row rank.
    for j in 0..t - 1 {
        for i in 0..s {
            eq.push((s + j, i * t + j, 1.0));
        }
    }
    let a = SparseMatrix::from_triplets(s + t - 1, n, &eq);
    let mut b = supply;
    b.extend(&demand[..t - 1]);
    let bm = SparseMatrix::from_triplets(n, n, &(0..n).map(|j| (j, j, -1.0)).collect::<Vec<_>>());
    let c = (0..n).map(|_| rng.gen_range(1..=20) as f64).collect();
    GeneralFormLP::new(format!("transport-{seed}-{s}x{t}"), c, a, b, bm, vec![0.0; n]).expect("valid transportation")
}
