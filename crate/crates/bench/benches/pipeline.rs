use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use amrpbs::batch::select_batch;
use amrpbs::benchmarks::problem_by_name;
use amrpbs::optimizer::{run_amr_pbs, RunConfig};
use amrpbs::problem::{lhs_sample, SampleSet, SamplingRange};

fn bench_select_batch(c: &mut Criterion) {
    let problem = problem_by_name("branin").unwrap();
    let pts = lhs_sample(problem.space(), 25, 7).unwrap();
    let ys = problem.eval_batch(&pts).unwrap();
    let data = SampleSet::from_pairs(pts, ys).unwrap();
    let range = SamplingRange::full(problem.space());
    c.bench_function("select_batch branin n=25 gamma=4", |b| {
        b.iter(|| select_batch(black_box(&data), &range, 4, 11).unwrap())
    });
}

fn bench_full_run(c: &mut Criterion) {
    let problem = problem_by_name("branin").unwrap();
    let mut group = c.benchmark_group("run_amr_pbs");
    group.sample_size(10);
    group.bench_function("branin n0=20 budget=30", |b| {
        b.iter(|| {
            let cfg = RunConfig::new(20, 30, 3);
            run_amr_pbs(black_box(&problem), &cfg).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_select_batch, bench_full_run);
criterion_main!(benches);
