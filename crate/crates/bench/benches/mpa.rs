use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lightasep::mpa::{densities_with, loc1_with, LocMethod, Precision};
use lightasep_bench::max_current;

fn sweeps(c: &mut Criterion) {
    let b = max_current();
    let mut g = c.benchmark_group("mpa");
    for n in [100, 400] {
        g.bench_with_input(BenchmarkId::new("densities_double", n), &n, |bench, &n| {
            bench.iter(|| densities_with(&b, n, Precision::Double).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("densities_high", n), &n, |bench, &n| {
            bench.iter(|| densities_with(&b, n, Precision::High).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("loc1_direct", n), &n, |bench, &n| {
            bench.iter(|| loc1_with(&b, n, LocMethod::Direct, Precision::Double).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
