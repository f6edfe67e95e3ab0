use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lightasep::exact::{build_generator, stationary};
use lightasep_bench::{max_current, rates};

fn solves(c: &mut Criterion) {
    let r = rates(&max_current());
    let mut g = c.benchmark_group("exact_stationary");
    g.sample_size(10);
    // dense LU below the switch, iterative above it
    for (n, lights) in [(8, 1), (12, 1)] {
        let gen = build_generator(n, lights, &r).unwrap();
        g.bench_with_input(BenchmarkId::new(format!("n{n}_r{lights}"), gen.dim()), &gen, |bench, gen| {
            bench.iter(|| stationary(gen).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, solves);
criterion_main!(benches);
