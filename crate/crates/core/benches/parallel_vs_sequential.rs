use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use convlab::bergman::{berndtsson_phi_fn, psh_mean_value_check, radial_moments_with};
use convlab::geometry::{disc_distance_check, shapes, AnalyticDisc};
use convlab::lab::spiral;
use convlab::numerics::QuadConfig;
use convlab::par;
use convlab::prekopa::{linspace, MarginalCurve};
use convlab::weights::paper_weight;

fn modes() -> [(&'static str, usize); 2] {
    [("sequential", 1), ("parallel", std::thread::available_parallelism().map_or(1, |n| n.get()))]
}

fn marginal_curve(c: &mut Criterion) {
    let phi = paper_weight("prekopa_cex", 0.1).unwrap();
    let dom = shapes::real_space(1, 1);
    let ts = linspace(-0.5, 0.5, 501);
    let cfg = QuadConfig::default();
    let mut g = c.benchmark_group("marginal_curve_501");
    for (mode, n) in modes() {
        g.bench_function(BenchmarkId::from_parameter(mode), |b| {
            b.iter(|| par::with_threads(n, || MarginalCurve::sample(&phi, &dom, black_box(&ts), &cfg).unwrap()))
        });
    }
    g.finish();
}

fn moment_table(c: &mut Criterion) {
    let cfg = QuadConfig::default();
    let mut g = c.benchmark_group("radial_moments_64");
    for (mode, n) in modes() {
        g.bench_function(BenchmarkId::from_parameter(mode), |b| {
            b.iter(|| {
                par::with_threads(n, || {
                    radial_moments_with("r^2", |r| r * r, black_box(64), &[], f64::INFINITY, &cfg).unwrap()
                })
            })
        });
    }
    g.finish();
}

fn disc_distance(c: &mut Criterion) {
    let disc = AnalyticDisc::new(vec![[0.0, 0.0], [0.5, 0.0]], vec![vec![[0.0, 0.0], [0.0, 0.0], [0.5, 0.0]]]);
    let dom = shapes::bidisc();
    let mut g = c.benchmark_group("disc_distance_20k");
    for (mode, n) in modes() {
        g.bench_function(BenchmarkId::from_parameter(mode), |b| {
            b.iter(|| par::with_threads(n, || disc_distance_check(&disc, &dom, black_box(20_000), 512).unwrap()))
        });
    }
    g.finish();
}

fn psh_check(c: &mut Criterion) {
    let centers = spiral(50, 0.6);
    let mut g = c.benchmark_group("berndtsson_phi_psh_50");
    g.sample_size(10);
    for (mode, n) in modes() {
        g.bench_function(BenchmarkId::from_parameter(mode), |b| {
            b.iter(|| {
                par::with_threads(n, || {
                    let u = berndtsson_phi_fn(0.3, QuadConfig::default()).unwrap();
                    psh_mean_value_check(u, black_box(&centers), &[0.05, 0.1], 64, 1e-7).unwrap()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, marginal_curve, moment_table, disc_distance, psh_check);
criterion_main!(benches);
