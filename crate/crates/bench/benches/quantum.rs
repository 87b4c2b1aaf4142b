use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ctx_core::quantum::{self, EvenCycleParams, GammaConfig, OddCycleParams};

fn constructions(c: &mut Criterion) {
    c.bench_function("odd construction n=5", |b| {
        let p = OddCycleParams::cabello();
        b.iter(|| quantum::build_odd_cycle(black_box(&p)).unwrap().witness_probability)
    });
    c.bench_function("even construction n=8", |b| {
        let p = EvenCycleParams::new(8, 0.3).unwrap();
        b.iter(|| quantum::build_even_cycle(black_box(&p)).unwrap().witness_probability)
    });
}

fn gamma(c: &mut Criterion) {
    let mut group = c.benchmark_group("gamma");
    group.sample_size(10);
    let cfg = GammaConfig { restarts: 8, ..GammaConfig::default() };
    for n in [5, 7, 9] {
        group.bench_function(format!("n={n}"), |b| b.iter(|| quantum::optimize_gamma(n, &cfg).unwrap().gamma));
    }
    group.finish();
}

criterion_group!(benches, constructions, gamma);
criterion_main!(benches);
