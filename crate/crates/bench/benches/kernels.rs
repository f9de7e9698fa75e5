//! Microbenchmarks for the hot kernels: low-discrepancy point generation,
//! batch fitness evaluation, and short optimizer runs.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use swarmnn::gravsearch::{minimize_gsa, GsaConfig};
use swarmnn::lowdisc::sobol_points;
use swarmnn::network::{mse_fitness, LabeledSample, Topology};
use swarmnn::swarm::{minimize, SwarmConfig};

fn synthetic_samples(n: usize, p: usize, r: usize) -> Vec<LabeledSample> {
    (0..n)
        .map(|i| {
            let features = (0..p)
                .map(|d| ((i * 31 + d * 7) % 17) as f64 / 8.5 - 1.0)
                .collect();
            let mut target = vec![0.0; r];
            target[i % r] = 1.0;
            LabeledSample { features, target }
        })
        .collect()
}

fn bench_sobol(c: &mut Criterion) {
    c.bench_function("sobol_256x64", |b| {
        b.iter(|| sobol_points(black_box(64), black_box(256), black_box(1)).unwrap())
    });
}

fn bench_fitness(c: &mut Criterion) {
    let topology = Topology::new(4, 9, 3).unwrap();
    let samples = synthetic_samples(120, 4, 3);
    let params: Vec<f64> = (0..topology.param_count())
        .map(|i| (i as f64 * 0.37).sin() * 3.0)
        .collect();
    c.bench_function("mse_fitness_120x4_h9", |b| {
        b.iter(|| mse_fitness(black_box(&params), topology, black_box(&samples)).unwrap())
    });
}

fn bench_pso(c: &mut Criterion) {
    let mut cfg = SwarmConfig::ppso_defaults(0);
    cfg.pop = 20;
    cfg.iters = 30;
    c.bench_function("pso_sphere_pop20_iters30_d10", |b| {
        b.iter(|| minimize(black_box(&cfg), 10, |x| Ok(x.iter().map(|v| v * v).sum())).unwrap())
    });
}

fn bench_gsa(c: &mut Criterion) {
    let mut cfg = GsaConfig::defaults(0);
    cfg.pop = 20;
    cfg.iters = 30;
    c.bench_function("gsa_sphere_pop20_iters30_d10", |b| {
        b.iter(|| {
            minimize_gsa(black_box(&cfg), 10, |x| Ok(x.iter().map(|v| v * v).sum())).unwrap()
        })
    });
}

criterion_group!(kernels, bench_sobol, bench_fitness, bench_pso, bench_gsa);
criterion_main!(kernels);
