use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use textchar_bench::blob;
use textchar_core::{axis_stats, density, diversity, homogeneity, MetricConfig};

fn bench_dispersion(c: &mut Criterion) {
    let mut group = c.benchmark_group("dispersion");
    for &dim in &[2usize, 768] {
        let cluster = blob(10_000, dim);
        group.bench_with_input(
            BenchmarkId::new("diversity+density", dim),
            &cluster,
            |b, c| {
                b.iter(|| {
                    let stats = axis_stats(black_box(c));
                    (diversity(&stats), density(&stats, &MetricConfig::default()))
                })
            },
        );
    }
    group.finish();
}

fn bench_homogeneity(c: &mut Criterion) {
    let mut group = c.benchmark_group("homogeneity");
    group.sample_size(10);
    for &(m, dim) in &[(500usize, 2usize), (2_000, 2), (500, 768), (2_000, 768)] {
        let cluster = blob(m, dim);
        group.bench_with_input(BenchmarkId::new(format!("H={dim}"), m), &cluster, |b, c| {
            b.iter(|| homogeneity(black_box(c)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_dispersion, bench_homogeneity);
criterion_main!(benches);
