//! Acceptance battery: one line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::{rel, smooth_field};
use dnls_core::experiments::{inequality_suite, periodized_gaussian, run_named, scaling_covariance, InequalityConfig, ScalingConfig, Verdict};
use dnls_core::flows::{algebraic_soliton, commutator_test, evolve, flow_map, hamiltonian, hamiltonian2, Flow, FlowConfig};
use dnls_core::gradients::{grad_alpha, identity_residuals, pairing};
use dnls_core::lax::determinant::determinant_on_window;
use dnls_core::lax::exterior::{trace_a2_exterior, trace_a_exterior};
use dnls_core::lax::{alpha_series, perturbation_determinant, trace_quadratic, trace_quartic, DeterminantOptions, Section, Window};
use dnls_core::spectral::sobolev_norm;
use dnls_core::{FieldState, Grid, KappaSet, Result};
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

const SWEEP_KAPPAS: [f64; 3] = [2.0, 8.0, 32.0];

/// 20 resolved random fields on the unit torus, masses spread over [0.1, 2].
fn sweep_fields() -> Vec<FieldState> {
    let g = Grid::unit(64).unwrap();
    (0..20).map(|i| smooth_field(g, 8, 0.3, 0.1 + 0.1 * i as f64, 1000 + i as u64)).collect()
}

fn c1_quadratic_trace() -> Result<Outcome> {
    let start = Instant::now();
    let (mut worst, mut bare) = (0.0f64, 0.0f64);
    for q in sweep_fields() {
        for kappa in SWEEP_KAPPAS {
            let w = Window::from_cutoff(q.grid(), 64.0 * kappa)?;
            let s = Section::new(&q, kappa, &w)?;
            let want = trace_quadratic(&q, kappa);
            worst = worst.max(rel(s.trace_a() + trace_a_exterior(&q, kappa, &w), want));
            bare = bare.max(rel(s.trace_a(), want));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-8 && secs < 120.0,
        format!("max rel err {worst:.2e} (bare window {bare:.2e}), {secs:.1} s"),
    )
}

fn c2_quartic_trace() -> Result<Outcome> {
    let (mut worst, mut bare) = (0.0f64, 0.0f64);
    for q in sweep_fields() {
        for kappa in SWEEP_KAPPAS {
            let w = Window::from_cutoff(q.grid(), 64.0 * kappa)?;
            let s = Section::new(&q, kappa, &w)?;
            // tr(A²) = (iκ)² tr((ΛΓ)²)
            let want = -kappa * kappa * trace_quartic(&q, kappa);
            worst = worst.max(rel(s.trace_a2() + trace_a2_exterior(&q, kappa, &w), want));
            bare = bare.max(rel(s.trace_a2(), want));
        }
    }
    outcome(worst <= 1e-8, format!("max rel err {worst:.2e} (bare window {bare:.2e})"))
}

fn c3_determinant_vs_series() -> Result<Outcome> {
    let (mut worst, mut held, mut refused) = (0.0f64, 0, 0);
    let options = DeterminantOptions::default();
    for q in sweep_fields() {
        for kappa in SWEEP_KAPPAS {
            let w = Window::from_cutoff(q.grid(), 64.0 * kappa)?;
            match alpha_series(&q, kappa, &w, 1e-15)?.value() {
                Some(alpha) => {
                    let a = perturbation_determinant(&q, kappa, &options)?.value;
                    worst = worst.max(rel((-alpha).exp(), a));
                    held += 1;
                }
                None => refused += 1,
            }
        }
    }
    outcome(
        worst <= 1e-8 && held > 0,
        format!("max rel err {worst:.2e} over {held} guarded pairs ({refused} refused by the guard)"),
    )
}

fn c4_gradients() -> Result<Outcome> {
    let g = Grid::unit(32)?;
    let kappa = 4.0;
    let q = smooth_field(g, 4, 0.4, 0.5, 7);
    let w = Window::from_cutoff(&g, 64.0 * kappa)?;
    let bundle = grad_alpha(&q, kappa, &w)?;
    let f = bundle.require()?;
    let a = |p: &FieldState| -> Result<Complex64> { Ok(determinant_on_window(p, kappa, &w)?.value) };
    let eps = 1e-5;
    let mut fd_err = 0.0f64;
    for j in 0..8 {
        let h = smooth_field(g, 4, 0.4, 1.0, 500 + j);
        let plus = a(&q.combine(Complex64::new(1.0, 0.0), &h, Complex64::new(eps, 0.0))?)?;
        let minus = a(&q.combine(Complex64::new(1.0, 0.0), &h, Complex64::new(-eps, 0.0))?)?;
        // α = −log a
        let fd = -(plus / minus).ln() / (2.0 * eps);
        fd_err = fd_err.max(rel(pairing(f, &h), fd));
    }

    // identities on a field whose gradients are not band limited, at N and 2N
    let field_on = |n: usize| -> Result<FieldState> { periodized_gaussian(Grid::unit(n)?, 0.08, 0.5, 0.5, 0.0) };
    let coarse = field_on(32)?;
    let fine = field_on(64)?;
    let scale = 1.0 + coarse.l2_norm().powi(3);
    let r_coarse = identity_residuals(&coarse, kappa, &Window::from_cutoff(coarse.grid(), 64.0 * kappa)?)?;
    let r_fine = identity_residuals(&fine, kappa, &Window::from_cutoff(fine.grid(), 64.0 * kappa)?)?;
    // once at the roundoff floor a residual cannot shrink further
    let floor = 1e-12 * scale;
    let quartered = r_fine.max() <= (r_coarse.max() / 4.0).max(floor);
    let bounded = r_fine.max() <= 1e-7 * scale;
    outcome(
        fd_err <= 1e-6 && bounded && quartered,
        format!(
            "finite differences {fd_err:.2e}; residuals N=32 {:.2e}, N=64 (r1 {:.2e}, r2 {:.2e}, r3 {:.2e})",
            r_coarse.max(),
            r_fine.r1,
            r_fine.r2,
            r_fine.r3
        ),
    )
}

fn drift(series: &[f64]) -> f64 {
    let s0 = series[0];
    series.iter().map(|v| (v - s0).abs()).fold(0.0, f64::max) / s0.abs().max(1e-300)
}

fn c5_dnls_conservation() -> Result<Outcome> {
    let start = Instant::now();
    let q0 = periodized_gaussian(Grid::new(512, 8.0)?, 0.5, 0.8 * 4.0 * PI, 4.0, 0.0)?;
    let probes = KappaSet::new(vec![4.0, 8.0, 16.0])?;
    let cfg = FlowConfig::new(Flow::Dnls, 1e-4, 1.0).with_probes(probes.clone()).with_stride(2000);
    let traj = evolve(&q0, &cfg)?;
    let m: Vec<f64> = traj.monitors.iter().map(|r| r.m).collect();
    let h: Vec<f64> = traj.monitors.iter().map(|r| r.h).collect();
    let h2: Vec<f64> = traj.monitors.iter().map(|r| r.h2).collect();
    let mut a_drift = 0.0f64;
    for k in probes.iter() {
        let a0 = traj.monitors[0].a_at(k).unwrap();
        for r in &traj.monitors {
            a_drift = a_drift.max(rel(r.a_at(k).unwrap(), a0));
        }
    }
    let worst = drift(&m).max(drift(&h)).max(drift(&h2)).max(a_drift);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-7 && secs < 600.0,
        format!(
            "drift M {:.1e}, H {:.1e}, H2 {:.1e}, a {a_drift:.1e}; {secs:.0} s",
            drift(&m),
            drift(&h),
            drift(&h2)
        ),
    )
}

fn c6_hk_flow() -> Result<Outcome> {
    let q0 = periodized_gaussian(Grid::unit(32)?, 0.25, 1.0, 0.5, 0.0)?.dealiased();
    let kappa = 64.0;
    let probes = KappaSet::new(vec![32.0, 64.0, 128.0])?;
    let mut cfg = FlowConfig::new(Flow::Hk, 5e-4, 1.0).with_kappa(kappa).with_probes(probes.clone()).with_stride(500);
    cfg.window_factor = 4.0;
    let traj = evolve(&q0, &cfg)?;
    let mut a_drift = 0.0f64;
    for k in probes.iter() {
        let a0 = traj.monitors[0].a_at(k).unwrap();
        for r in &traj.monitors {
            a_drift = a_drift.max(rel(r.a_at(k).unwrap(), a0));
        }
    }
    let c_coarse = commutator_test(&q0, 0.05, 0.05, kappa, 2e-3, 4.0)?;
    let c_half = commutator_test(&q0, 0.05, 0.05, kappa, 1e-3, 4.0)?;
    let c_fine = commutator_test(&q0, 0.05, 0.05, kappa, 1e-4, 4.0)?;
    let pass = traj.halted.is_none() && a_drift <= 1e-7 && c_coarse >= 4.0 * c_half && c_fine <= 1e-6;
    outcome(
        pass,
        format!(
            "a drift {a_drift:.1e}; commutator dt 2e-3 {c_coarse:.2e}, 1e-3 {c_half:.2e} (ratio {:.1}), 1e-4 {c_fine:.2e}",
            c_coarse / c_half
        ),
    )
}

fn c7_difference_flow() -> Result<Outcome> {
    let q0 = periodized_gaussian(Grid::unit(32)?, 0.25, 1.0, 0.5, 0.0)?.dealiased();
    let g = q0.grid();
    let xi_max = g.retained_max_frequency();
    let sup = q0.samples().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let mut dists = Vec::new();
    for kappa in [16.0, 32.0, 64.0, 128.0, 256.0] {
        // stay inside the step guard: dt·ρ ≤ 0.9
        let rho = 3.0 * sup * xi_max * (xi_max * xi_max / (4.0 * kappa * kappa)).min(1.0);
        let dt = (1e-2f64).min(0.9 / rho);
        let q1 = flow_map(&q0, Flow::Diff, kappa, dt, 1.0, 2.0)?;
        dists.push(sobolev_norm(&q1.sub(&q0)?, -4.0));
    }
    let decreasing = dists.windows(2).all(|p| p[1] < p[0]);
    let ratio = dists[4] / dists[0];
    let text: Vec<String> = dists.iter().map(|d| format!("{d:.2e}")).collect();
    outcome(
        decreasing && ratio <= 0.1,
        format!("H^-4 distances [{}], final/initial {ratio:.3}", text.join(", ")),
    )
}

fn c8_equicontinuity() -> Result<Outcome> {
    let report = run_named("equicontinuity", None, None)?;
    let knorm = &report.checks["knorm_growth"];
    let det = &report.checks["det_vs_tr"];
    outcome(
        report.verdict == Verdict::Pass,
        format!(
            "verdict {:?}; knorm growth {:.2e} <= {:.2e}; det-vs-tr {:.3} <= {:.3}",
            report.verdict, knorm.value, knorm.bound, det.value, det.bound
        ),
    )
}

fn c9_soliton() -> Result<Outcome> {
    let q = algebraic_soliton(Grid::new(1024, 16.0)?, 2)?;
    let dm = (q.mass() - 4.0 * PI).abs();
    let h = hamiltonian(&q).abs();
    let h2 = hamiltonian2(&q).abs();
    outcome(dm <= 1e-6 && h <= 1e-6 && h2 <= 1e-5, format!("|M-4pi| {dm:.1e}, |H| {h:.1e}, |H2| {h2:.1e}"))
}

fn c10_inequalities() -> Result<Outcome> {
    let report = inequality_suite(7, &InequalityConfig::default())?;
    let failed = report.failed_checks();
    outcome(
        report.verdict == Verdict::Pass,
        format!(
            "det2ish worst ratio {:.3}, unwrap worst ratio {:.3}; failed checks: {}",
            report.summary["det2ish_worst_ratio"],
            report.summary["unwrap_worst_ratio"],
            if failed.is_empty() { "none".to_string() } else { failed.join(", ") }
        ),
    )
}

fn c11_scaling() -> Result<Outcome> {
    let report = scaling_covariance(&ScalingConfig::default())?;
    let c = |k: &str| report.checks.get(k).map(|c| c.value).unwrap_or(f64::NAN);
    outcome(
        report.verdict == Verdict::Pass,
        format!(
            "mass {:.1e}, determinant {:.1e}, space-time {:.1e}",
            c("mass_invariance"),
            c("determinant_covariance"),
            c("flow_covariance")
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("quadratic trace closed form", c1_quadratic_trace),
        ("quartic trace closed form", c2_quartic_trace),
        ("determinant vs series", c3_determinant_vs_series),
        ("gradient correctness", c4_gradients),
        ("DNLS conservation", c5_dnls_conservation),
        ("H_kappa conservation and commutativity", c6_hk_flow),
        ("difference-flow collapse", c7_difference_flow),
        ("equicontinuity below 4pi", c8_equicontinuity),
        ("soliton invariants", c9_soliton),
        ("inequality suite", c10_inequalities),
        ("scaling covariance", c11_scaling),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
