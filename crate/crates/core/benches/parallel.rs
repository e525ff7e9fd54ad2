use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gauge_core::{cousin_partition, fixtures, integrate, Execution, Gauge, IntegrateOptions, Measure, SubdivisionPolicy};
use std::hint::black_box;

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn partitioning(c: &mut Criterion) {
    let mut group = c.benchmark_group("cousin_partition");
    group.sample_size(10);
    let gauge = Gauge::constant(1e-4);
    for m in [Measure::Lebesgue, Measure::cantor_ifs(0.5).unwrap()] {
        let whole = m.whole_space();
        for (name, exec) in modes() {
            let policy = SubdivisionPolicy::default().with_execution(exec);
            group.bench_function(BenchmarkId::new(name, m.name()), |b| {
                b.iter(|| cousin_partition(black_box(&whole), &gauge, &policy).unwrap())
            });
        }
    }
    group.finish();
}

fn integration(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate");
    group.sample_size(10);
    let f = fixtures::hk_oscillatory();
    for (name, exec) in modes() {
        let opts = IntegrateOptions::default().with_execution(exec);
        group.bench_function(BenchmarkId::new(name, f.name()), |b| {
            b.iter(|| integrate(&f, &Measure::Lebesgue, &Measure::Lebesgue.whole_space(), black_box(1e-2), &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, partitioning, integration);
criterion_main!(benches);
