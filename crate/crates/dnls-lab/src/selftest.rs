//! Fast invariant battery. The transcript lists each check against its
//! tolerance only, so reruns print identical text.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dnls_core::flows::{branch_coth, soliton_profile, RESOLVED_START};
use dnls_core::gradients::{grad_alpha, pairing};
use dnls_core::lax::determinant::determinant_on_window;
use dnls_core::lax::exterior::{trace_a2_exterior, trace_a_exterior};
use dnls_core::lax::{alpha_series, trace_quadratic, trace_quartic, Section, Window};
use dnls_core::spectral::transform::{forward, inverse};
use dnls_core::{FieldState, Grid, Result};

/// Faults that can be injected to prove the battery notices them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Shift coth β off the periodic branches.
    BranchConvention,
}

pub struct Outcome {
    pub name: &'static str,
    pub tolerance: f64,
    pub passed: bool,
}

fn field(grid: Grid, band: i64, mass: f64, seed: u64) -> Result<FieldState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![Complex64::new(0.0, 0.0); grid.modes()];
    for m in -band..=band {
        let env = (-0.3 * m.abs() as f64).exp();
        c[grid.index(m).expect("band fits")] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * env;
    }
    let q = FieldState::from_coefficients(grid, c)?;
    Ok(q.scaled(Complex64::new((mass / q.mass()).sqrt(), 0.0)))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn round_trip() -> Result<f64> {
    let q = field(Grid::new(64, 2.0 * PI)?, 20, 1.0, 1)?;
    let back = forward(&inverse(q.coefficients()));
    let err = back.iter().zip(q.coefficients()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let parseval = (q.physical_mass() - q.mass()).abs() / q.mass();
    Ok(err.max(parseval))
}

fn traces() -> Result<(f64, f64)> {
    let q = field(Grid::unit(64)?, 8, 0.5, 2)?;
    let (mut t2, mut t4) = (0.0f64, 0.0f64);
    for kappa in [2.0, 8.0] {
        let w = Window::from_cutoff(q.grid(), 64.0 * kappa)?;
        let s = Section::new(&q, kappa, &w)?;
        let full_a = s.trace_a() + trace_a_exterior(&q, kappa, &w);
        let full_a2 = s.trace_a2() + trace_a2_exterior(&q, kappa, &w);
        t2 = t2.max(rel(full_a, trace_quadratic(&q, kappa)));
        // tr(A²) = (iκ)² tr((ΛΓ)²)
        t4 = t4.max(rel(full_a2, -kappa * kappa * trace_quartic(&q, kappa)));
    }
    Ok((t2, t4))
}

fn det_vs_series() -> Result<f64> {
    let q = field(Grid::unit(64)?, 8, 0.5, 3)?;
    let kappa = 8.0;
    let w = Window::from_cutoff(q.grid(), 64.0 * kappa)?;
    let a = determinant_on_window(&q, kappa, &w)?.value;
    let alpha = alpha_series(&q, kappa, &w, 1e-14)?.value().unwrap_or(Complex64::new(f64::NAN, 0.0));
    Ok(rel((-alpha).exp(), a))
}

fn gradient_fd() -> Result<f64> {
    let g = Grid::unit(32)?;
    let q = field(g, 4, 0.5, 4)?;
    let kappa = 4.0;
    let w = Window::from_cutoff(&g, 64.0 * kappa)?;
    let bundle = grad_alpha(&q, kappa, &w)?;
    let f = bundle.require()?;
    let alpha = |p: &FieldState| -> Result<Complex64> { Ok(determinant_on_window(p, kappa, &w)?.value) };
    let mut worst = 0.0f64;
    for seed in 0..2 {
        let h = field(g, 4, 1.0, 100 + seed)?;
        let eps = 1e-5;
        let plus = alpha(&q.combine(Complex64::new(1.0, 0.0), &h, Complex64::new(eps, 0.0))?)?;
        let minus = alpha(&q.combine(Complex64::new(1.0, 0.0), &h, Complex64::new(-eps, 0.0))?)?;
        // α = −log a, so the difference quotient is −log(a₊/a₋)/2ε
        let fd = -(plus / minus).ln() / (2.0 * eps);
        worst = worst.max(rel(pairing(f, &h), fd));
    }
    Ok(worst)
}

/// Each branch must give an L-periodic, resolved profile of mass 4π.
fn branch_consistency(fault: Option<Fault>) -> Result<f64> {
    let g = Grid::new(1024, 4.0)?;
    let mut worst = 0.0f64;
    for j in 0..3 {
        let cb = match fault {
            Some(Fault::BranchConvention) => branch_coth(j) - 1.0,
            None => branch_coth(j),
        };
        let q = soliton_profile(g, cb)?;
        worst = worst.max(q.top_octave_fraction() / RESOLVED_START).max((q.mass() - 4.0 * PI).abs() / 1e-9);
    }
    // reported on the scale where 1 is the tolerance
    Ok(worst)
}

pub fn run(fault: Option<Fault>) -> Result<Vec<Outcome>> {
    let (t2, t4) = traces()?;
    let checks: [(&'static str, f64, f64); 6] = [
        ("transform_round_trip", round_trip()?, 1e-12),
        ("trace_quadratic_closed_form", t2, 1e-8),
        ("trace_quartic_closed_form", t4, 1e-8),
        ("determinant_vs_series", det_vs_series()?, 1e-8),
        ("gradient_finite_difference", gradient_fd()?, 1e-6),
        ("branch_consistency", branch_consistency(fault)?, 1.0),
    ];
    Ok(checks
        .into_iter()
        .map(|(name, value, tolerance)| Outcome {
            name,
            tolerance,
            passed: value <= tolerance,
        })
        .collect())
}
