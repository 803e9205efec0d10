use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nave_bench::problem;
use nave_core::harness::{run_method, Method, RunParams};

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    g.sample_size(20);
    for id in ["r3:b3", "r4:bstar3", "tridiag:d=50", "ridge:m=10:d=10", "ode-stiff:h=0.05:T=5:x0=-1"] {
        let p = problem(id);
        for m in Method::ALL {
            g.bench_with_input(BenchmarkId::new(m.as_str(), id), &p, |b, p| {
                b.iter(|| run_method(black_box(p), m, RunParams::default()).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, solve);
criterion_main!(benches);
