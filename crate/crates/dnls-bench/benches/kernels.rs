use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dnls_core::experiments::periodized_gaussian;
use dnls_core::flows::{Flow, Stepper};
use dnls_core::gradients::grad_alpha;
use dnls_core::lax::{perturbation_determinant, spectral_scan, DeterminantOptions, Window};
use dnls_core::{FieldState, Grid, KappaSet};

fn gaussian(modes: usize) -> FieldState {
    periodized_gaussian(Grid::new(modes, 8.0).unwrap(), 0.5, 4.0, 4.0, 0.0).unwrap()
}

fn determinant(c: &mut Criterion) {
    let q = gaussian(256);
    let opts = DeterminantOptions::default();
    let mut group = c.benchmark_group("determinant");
    for kappa in [1.0, 8.0, 64.0] {
        group.bench_with_input(BenchmarkId::from_parameter(kappa), &kappa, |b, &k| {
            b.iter(|| perturbation_determinant(black_box(&q), k, &opts).unwrap())
        });
    }
    group.finish();
}

fn scan(c: &mut Criterion) {
    let q = gaussian(256);
    // large κ rows are dominated by the dense α-series section
    let kappas = KappaSet::dyadic(0, 3);
    let opts = DeterminantOptions::default();
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.bench_function("dyadic_1_to_8", |b| b.iter(|| spectral_scan(black_box(&q), &kappas, &opts).unwrap()));
    group.finish();
}

fn flow_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow_step");
    group.sample_size(20);
    for modes in [256, 1024] {
        let q = gaussian(modes).dealiased();
        let stepper = Stepper::new(Flow::Dnls, 1.0, *q.grid(), true, 8.0).unwrap();
        group.bench_with_input(BenchmarkId::new("dnls", modes), q.coefficients(), |b, c| {
            b.iter(|| stepper.step(black_box(c), 1e-4).unwrap())
        });
    }
    let q = periodized_gaussian(Grid::unit(32).unwrap(), 0.25, 1.0, 0.5, 0.0).unwrap().dealiased();
    let stepper = Stepper::new(Flow::Hk, 16.0, *q.grid(), true, 4.0).unwrap();
    group.bench_function("hk/32", |b| b.iter(|| stepper.step(black_box(q.coefficients()), 1e-4).unwrap()));
    group.finish();
}

fn gradient(c: &mut Criterion) {
    let q = periodized_gaussian(Grid::unit(32).unwrap(), 0.25, 1.0, 0.5, 0.0).unwrap();
    let kappa = 8.0;
    let w = Window::from_cutoff(q.grid(), 8.0 * kappa).unwrap();
    c.bench_function("grad_alpha/kappa_8", |b| b.iter(|| grad_alpha(black_box(&q), kappa, &w).unwrap()));
}

criterion_group!(benches, determinant, scan, flow_step, gradient);
criterion_main!(benches);
