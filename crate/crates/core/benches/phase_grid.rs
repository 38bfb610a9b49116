use std::hint::black_box;

use cocycle_core::cocycle::{cocycle_product_lognorm, golden_mean, lyapunov_exponent, CocycleSpec};
use cocycle_core::{par, FourierPotential};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn spec() -> CocycleSpec {
    CocycleSpec::new(FourierPotential::bichromatic(), golden_mean(), 3.0, 0.4, 0.05).unwrap()
}

fn phase_grid(c: &mut Criterion) {
    let cocycle = spec();
    let n = 2000;
    let threads = std::thread::available_parallelism().map_or(1, |t| t.get());
    let mut group = c.benchmark_group("phase_grid");
    group.sample_size(10);
    for m in [64usize, 256] {
        group.bench_with_input(BenchmarkId::new("sequential", m), &m, |b, &m| {
            b.iter(|| {
                let logs: Vec<f64> = (0..m)
                    .map(|j| cocycle_product_lognorm(&cocycle, j as f64 / m as f64, n).unwrap())
                    .collect();
                black_box(par::pairwise_sum(&logs))
            })
        });
        group.bench_with_input(BenchmarkId::new("one_worker", m), &m, |b, &m| {
            b.iter(|| par::with_workers(Some(1), || black_box(lyapunov_exponent(&cocycle, n, m).unwrap())))
        });
        group.bench_with_input(BenchmarkId::new(format!("{threads}_workers"), m), &m, |b, &m| {
            b.iter(|| par::with_workers(Some(threads), || black_box(lyapunov_exponent(&cocycle, n, m).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, phase_grid);
criterion_main!(benches);
