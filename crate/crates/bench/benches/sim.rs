use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use lightasep::experiments::extremal_pair;
use lightasep::sim::{coalescence_time, light_path, min_half_width, simulate_open, SampleSpec, SimState};
use lightasep_bench::{high_density, max_current, rates};

fn kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("sim");
    let horizon = 100.0;
    let l = min_half_width(horizon, 0);
    // events per run, for throughput in events per second
    let edges = (2 * l - 2) as u64;
    g.throughput(Throughput::Elements((edges as f64 * horizon) as u64));
    g.bench_function("light_path_T100", |b| b.iter(|| light_path(l, 0.75, 0.0, &[horizon], 7).unwrap()));

    let r = rates(&max_current());
    let init = SimState::open((0..200).map(|i| if i == 0 { 2 } else { (i % 2) as u8 }).collect()).unwrap();
    let spec = SampleSpec { sites: vec![], snapshots: false };
    g.throughput(Throughput::Elements((199.0 * 1.3 * 50.0) as u64));
    g.bench_function("open_n200_T50", |b| b.iter(|| simulate_open(&init, &r, 50.0, 3, 1.0, &spec).unwrap()));

    g.throughput(Throughput::Elements(1));
    let hd = rates(&high_density());
    g.sample_size(20);
    g.bench_function("coalescence_n64", |b| {
        b.iter(|| {
            let (top, bottom) = extremal_pair(64, 1).unwrap();
            coalescence_time(top, bottom, &hd, 11, 1e5).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
