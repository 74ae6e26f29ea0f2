//! Rayon core vs the sequential fallback on the two parallel workloads:
//! circuit enumeration (one large subset scan) and batch verification
//! (many small independent instances).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sdaug::harness::{verify_problem, Problem, RunConfig};
use sdaug::instances::{self, RandomPolytopeSpec};
use sdaug::oracle::CircuitOracle;
use sdaug::par::{self, Execution};

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle-enumeration");
    group.sample_size(10);
    for dim in [5, 6] {
        let lp = instances::cube(dim);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("cube{dim}")), &lp, |b, lp| {
                b.iter(|| CircuitOracle::new(black_box(lp), exec).unwrap().circuits().len())
            });
        }
    }
    let spec = RandomPolytopeSpec {
        max_n: 6,
        max_m_ineq: 14,
        coeff: 3,
    };
    let lp = instances::random_polytope(17, spec);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "random-17"), &lp, |b, lp| {
            b.iter(|| CircuitOracle::new(black_box(lp), exec).unwrap().circuits().len())
        });
    }
    group.finish();
}

fn batch_verify(c: &mut Criterion) {
    let problems: Vec<Problem> = (0..32u64)
        .map(|seed| Problem {
            label: format!("random-{seed}"),
            lp: instances::random_polytope(seed, RandomPolytopeSpec::default()),
        })
        .collect();
    let cfg = RunConfig::default();
    let mut group = c.benchmark_group("batch-verify");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, problems.len()), |b| {
            b.iter(|| par::map(exec, &problems, |p| verify_problem(p, &cfg).map(|r| r.passed())))
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, batch_verify);
criterion_main!(benches);
