use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use amrpbs::batch::expected_improvement;
use amrpbs::problem::{lhs_sample, DesignSpace, SampleSet};
use amrpbs::surrogate::{gp_posterior, train, KernelFamily, KernelSpec, SurrogateKind};

fn training_data(n: usize, dims: usize) -> SampleSet {
    let space = DesignSpace::unit(dims);
    let pts = lhs_sample(&space, n, 42).unwrap();
    let ys: Vec<f64> = pts
        .iter()
        .map(|p| p.iter().map(|v| (3.0 * v).sin()).sum())
        .collect();
    SampleSet::from_pairs(pts, ys).unwrap()
}

fn bench_train(c: &mut Criterion) {
    let mut group = c.benchmark_group("train");
    for n in [30usize, 60, 120] {
        let data = training_data(n, 2);
        group.bench_with_input(BenchmarkId::new("kriging", n), &data, |b, data| {
            b.iter(|| {
                train(
                    SurrogateKind::Kriging,
                    &KernelSpec::auto(KernelFamily::Gaussian),
                    black_box(data),
                )
                .unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("rbf-gaussian", n), &data, |b, data| {
            b.iter(|| {
                train(
                    SurrogateKind::Rbf,
                    &KernelSpec::auto(KernelFamily::Gaussian),
                    black_box(data),
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_posterior(c: &mut Criterion) {
    let data = training_data(80, 2);
    let gp = train(
        SurrogateKind::Kriging,
        &KernelSpec::auto(KernelFamily::Gaussian),
        &data,
    )
    .unwrap();
    c.bench_function("gp_posterior n=80", |b| {
        b.iter(|| gp_posterior(black_box(&gp), black_box(&[0.31, 0.77])).unwrap())
    });
    c.bench_function("expected_improvement n=80", |b| {
        b.iter(|| expected_improvement(black_box(&gp), black_box(&[0.31, 0.77]), -0.5))
    });
}

criterion_group!(benches, bench_train, bench_posterior);
criterion_main!(benches);
