use super::*;
use crate::instances;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn assert_certified(std: &StandardLP, res: &SimplexResult) {
    let cert = certify(std, res);
    assert!(cert.residual <= 1e-7, "residual {}", cert.residual);
    assert!(cert.bound_violation <= 1e-7, "bound violation {}", cert.bound_violation);
    assert!(
        cert.dual_infeasibility <= 1e-9,
        "dual infeasibility {}",
        cert.dual_infeasibility
    );
}

/// `min -2x1 - x2  s.t.  x1 + x2 + s = 1,  0 <= x <= 1,  s >= 0`.
fn bounded_triangle() -> StandardLP {
    let e = SparseMatrix::from_dense(&[vec![1.0, 1.0, 1.0]], 3);
    StandardLP::new(
        vec![-2.0, -1.0, 0.0],
        &e,
        vec![1.0],
        vec![0.0; 3],
        vec![1.0, 1.0, f64::INFINITY],
    )
    .unwrap()
}

/// Random `min q.z, E z = E z0, 0 <= z <= u` with a known feasible `z0`.
fn random_box_lp(seed: u64, m: usize, n: usize) -> StandardLP {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trip = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if rng.gen_bool(0.5) {
                trip.push((i, j, rng.gen_range(-5..=5) as f64));
            }
        }
    }
    let e = SparseMatrix::from_triplets(m, n, &trip);
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=4) as f64).collect();
    let z0: Vec<f64> = u.iter().map(|ub| rng.gen_range(0.0..*ub)).collect();
    let f = e.mul_vec(&z0);
    let q = (0..n).map(|_| rng.gen_range(-10..=10) as f64).collect();
    StandardLP::new(q, &e, f, vec![0.0; n], u).unwrap()
}

#[test]
fn computational_form_dimensions() {
    let (std, map) = to_computational_form(&instances::triangle());
    assert_eq!((std.num_cols(), std.num_rows()), (5, 3));
    assert_eq!(&std.lower()[2..], &[0.0, 0.0, 0.0]);
    assert!(std.lower()[..2].iter().all(|l| *l == f64::NEG_INFINITY));
    assert_eq!(map.recover(&[1.0, 2.0, 3.0, 4.0, 5.0]), vec![1.0, 2.0]);
    let lp = GeneralFormLP::from_dense(
        "eq",
        vec![1.0, 1.0],
        &[vec![1.0, 1.0]],
        vec![1.0],
        &[vec![-1.0, 0.0], vec![0.0, -1.0]],
        vec![0.0, 0.0],
    )
    .unwrap();
    let (std, _) = to_computational_form(&lp);
    assert_eq!((std.num_cols(), std.num_rows()), (4, 3));
}

#[test]
fn triangle_cold_primal() {
    let (std, map) = to_computational_form(&instances::triangle());
    let res = primal_solve(&std, None, &SimplexOptions::default());
    assert_eq!(res.status, SimplexStatus::Optimal);
    let x = map.recover(&res.z);
    assert!(close(x[0], 1.0, 1e-9) && close(x[1], 0.0, 1e-9), "{x:?}");
    assert!(close(res.objective, -2.0, 1e-12));
    assert!(res.basis.is_consistent(std.num_cols() + std.num_rows()));
    assert_certified(&std, &res);
}

#[test]
fn zero_objective_is_optimal_immediately() {
    let (mut std, _) = to_computational_form(&instances::triangle());
    std.set_objective(vec![0.0; 5]);
    let res = primal_solve(&std, None, &SimplexOptions::default());
    assert_eq!(res.status, SimplexStatus::Optimal);
    assert_eq!(res.objective, 0.0);
    assert_eq!(res.iters_phase2, 0);
}

#[test]
fn unbounded_with_ray() {
    let e = SparseMatrix::from_dense(&[vec![1.0, -1.0]], 2);
    let free = vec![f64::NEG_INFINITY; 2];
    let std = StandardLP::new(vec![-1.0, 0.0], &e, vec![0.0], free, vec![f64::INFINITY; 2]).unwrap();
    let res = primal_solve(&std, None, &SimplexOptions::default());
    assert_eq!(res.status, SimplexStatus::Unbounded);
    let ray = res.ray.expect("ray");
    assert!(ray[0] > 0.0 && close(ray[0], ray[1], 1e-12));
}

#[test]
fn contradictory_bounds_are_infeasible() {
    let e = SparseMatrix::from_dense(&[vec![1.0, 1.0]], 2);
    let std = StandardLP::new(vec![1.0, 1.0], &e, vec![5.0], vec![0.0; 2], vec![1.0; 2]).unwrap();
    let res = primal_solve(&std, None, &SimplexOptions::default());
    assert_eq!(res.status, SimplexStatus::PrimalInfeasible);
    assert!(res.farkas.is_some());
    let res = dual_solve(&std, &Basis::crash(&std), &SimplexOptions::default());
    assert_eq!(res.status, SimplexStatus::PrimalInfeasible);
}

#[test]
fn dual_resolve_after_tightening() {
    let mut std = bounded_triangle();
    let opts = SimplexOptions::default();
    let first = primal_solve(&std, None, &opts);
    assert_eq!(first.status, SimplexStatus::Optimal);
    assert!(close(first.objective, -2.0, 1e-12));
    let again = dual_solve(&std, &first.basis, &opts);
    assert_eq!(again.status, SimplexStatus::Optimal);
    assert_eq!(again.iterations(), 0);
    std.set_upper(0, 0.5);
    let warm = dual_solve(&std, &first.basis, &opts);
    assert_eq!(warm.status, SimplexStatus::Optimal);
    assert!(close(warm.objective, -1.5, 1e-12), "{}", warm.objective);
    assert_eq!(warm.iters_phase1, 0);
    assert_certified(&std, &warm);
}

#[test]
fn phase1_points() {
    let (p, basis, res) = phase1_feasible_point(&instances::triangle(), &SimplexOptions::default()).unwrap();
    assert_eq!(res.iters_phase1, 0);
    assert_eq!(p.x, vec![0.0, 0.0]);
    assert_eq!(basis.basic.len(), 3);
    assert!(matches!(
        phase1_feasible_point(&instances::infeasible_interval(), &SimplexOptions::default()),
        Err(Error::Infeasible)
    ));
    let (p, _, _) =
        phase1_feasible_point(&instances::random_transportation(3, 3, 4), &SimplexOptions::default()).unwrap();
    assert!(p.eq_residual < 1e-7 && p.min_slack() > -1e-7);
}

#[test]
fn warm_and_cold_agree_on_perturbations() {
    let opts = SimplexOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for seed in 0..20u64 {
        let mut std = random_box_lp(seed, 6, 12);
        let mut basis = match primal_solve(&std, None, &opts) {
            r if r.status == SimplexStatus::Optimal => r.basis,
            _ => continue,
        };
        for _ in 0..10 {
            let j = rng.gen_range(0..std.num_cols());
            let ub = std.upper()[j];
            std.set_upper(j, if rng.gen_bool(0.5) { ub * 0.5 } else { ub + 1.0 });
            let warm = dual_solve(&std, &basis, &opts);
            let cold = primal_solve(&std, None, &opts);
            assert_eq!(warm.status, cold.status, "seed {seed}");
            if cold.status == SimplexStatus::Optimal {
                assert!(
                    close(warm.objective, cold.objective, 1e-7),
                    "{} vs {}",
                    warm.objective,
                    cold.objective
                );
                assert_certified(&std, &warm);
                basis = warm.basis;
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 200);
}

#[test]
fn deterministic_runs() {
    let std = random_box_lp(11, 8, 15);
    let a = primal_solve(&std, None, &SimplexOptions::default());
    let b = primal_solve(&std, None, &SimplexOptions::default());
    assert_eq!(a.z, b.z);
    assert_eq!(a.iterations(), b.iterations());
    assert_eq!(a.basis, b.basis);
}

#[test]
fn bland_terminates_on_degenerate_pyramid() {
    let (std, map) = to_computational_form(&instances::pyramid());
    for rule in [PivotRule::Bland, PivotRule::DantzigWithBlandFallback] {
        let opts = SimplexOptions {
            pivot_rule: rule,
            ..SimplexOptions::default()
        };
        let res = primal_solve(&std, None, &opts);
        assert_eq!(res.status, SimplexStatus::Optimal);
        assert!(close(res.objective, -1.0, 1e-12));
        let x = map.recover(&res.z);
        assert!(close(x[2], 1.0, 1e-9));
    }
}

#[test]
fn trace_is_recorded_on_request() {
    let std = random_box_lp(3, 5, 10);
    let opts = SimplexOptions {
        record_trace: true,
        ..SimplexOptions::default()
    };
    let res = primal_solve(&std, None, &opts);
    assert_eq!(res.trace.len(), res.iterations());
}

#[test]
fn iteration_limit_is_reported() {
    let std = random_box_lp(5, 8, 16);
    let opts = SimplexOptions {
        max_iters: Some(1),
        ..SimplexOptions::default()
    };
    let res = primal_solve(&std, None, &opts);
    assert!(matches!(
        res.status,
        SimplexStatus::IterationLimit | SimplexStatus::Optimal
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn primal_and_dual_reach_same_objective(seed in 0u64..100_000, m in 2usize..7, extra in 1usize..8) {
        let std = random_box_lp(seed, m, m + extra);
        let opts = SimplexOptions::default();
        let p = primal_solve(&std, None, &opts);
        let d = dual_solve(&std, &Basis::crash(&std), &opts);
        prop_assert_eq!(p.status, SimplexStatus::Optimal);
        prop_assert_eq!(d.status, SimplexStatus::Optimal);
        prop_assert!(close(p.objective, d.objective, 1e-7), "{} vs {}", p.objective, d.objective);
        let cert = certify(&std, &d);
        prop_assert!(cert.residual <= 1e-7 && cert.bound_violation <= 1e-7 && cert.dual_infeasibility <= 1e-9);
    }
}
