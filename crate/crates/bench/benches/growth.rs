use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use growthforge_bench::{plain_system, recurrent_system, reference_growth};
use growthforge_core::growthfn::{check_basic, compute_mu};

fn evaluation(c: &mut Criterion) {
    c.bench_function("check_basic/64", |b| {
        b.iter(|| check_basic(&reference_growth(), black_box(64)).unwrap())
    });
    c.bench_function("compute_mu/t=2", |b| {
        let g = reference_growth();
        b.iter(|| compute_mu(&g, black_box(2), 0, 12).unwrap())
    });
}

fn construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    group.sample_size(20);
    for depth in [5u32, 7] {
        group.bench_with_input(BenchmarkId::new("plain", depth), &depth, |b, &d| {
            b.iter(|| plain_system(d))
        });
        group.bench_with_input(BenchmarkId::new("recurrent", depth), &depth, |b, &d| {
            b.iter(|| recurrent_system(d, 6))
        });
    }
    group.finish();
}

criterion_group!(benches, evaluation, construction);
criterion_main!(benches);
