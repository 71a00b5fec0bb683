use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use probflux_bench::{cone_bump, periodic_bump};
use probflux_core::limiters::equality_limiters;
use probflux_core::markov::evolve_periodic;
use probflux_core::schemes::step;
use probflux_core::{
    simulate_mc, Boundary, ConservationLaw, LimiterSet, SchemeConfig, SchemeKind, SpeedModel,
    SpeedSampling,
};

fn periodic_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("periodic_step");
    let limiter = SchemeKind::Limiter(LimiterSet::new(-0.5, -0.5, 0.5, 0.5).unwrap());
    for m in [1 << 10, 1 << 16] {
        let (_, u) = periodic_bump(m);
        group.throughput(Throughput::Elements(m as u64));
        for (name, kind) in [("upwind", SchemeKind::Upwind), ("limiter", limiter)] {
            let cfg = SchemeConfig::constant(kind, 1.0);
            let coeffs = cfg.coefficients(&u, 0.5, Boundary::Periodic).unwrap();
            group.bench_with_input(BenchmarkId::new(name, m), &u, |b, u| {
                b.iter(|| step(black_box(u), &coeffs, 0.5, Boundary::Periodic, None, 0.5).unwrap())
            });
        }
    }
    group.finish();
}

fn burgers_run(c: &mut Criterion) {
    let (grid, u0) = periodic_bump(2048);
    let cfg = SchemeConfig {
        kind: SchemeKind::Upwind,
        speed: SpeedModel::Law {
            law: ConservationLaw::Burgers,
            sampling: SpeedSampling::Averaged,
        },
    };
    let tau = 0.5 * grid.h();
    c.bench_function("burgers_100_steps_2048", |b| {
        b.iter(|| evolve_periodic(black_box(&u0), &cfg, &grid, tau, 100, None, true).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_mc");
    group.sample_size(20);
    let (grid, d0) = cone_bump(32, 0.5);
    let cfg = SchemeConfig::constant(SchemeKind::LaxFriedrichs, 0.8);
    for paths in [10_000u64, 100_000] {
        group.throughput(Throughput::Elements(paths));
        group.bench_with_input(BenchmarkId::from_parameter(paths), &paths, |b, &paths| {
            b.iter(|| simulate_mc((32, 32), black_box(&d0), &cfg, &grid, paths, 7).unwrap())
        });
    }
    group.finish();
}

fn limiter_roots(c: &mut Criterion) {
    c.bench_function("equality_limiters", |b| {
        b.iter(|| equality_limiters(black_box(0.7), black_box(-0.25), black_box(0.25)).unwrap())
    });
}

criterion_group!(
    benches,
    periodic_step,
    burgers_run,
    monte_carlo,
    limiter_roots
);
criterion_main!(benches);
