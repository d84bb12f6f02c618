#![allow(dead_code)]

use dnls_core::spectral::{FieldState, Grid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random smooth field: coefficients in |m| ≤ band with e^{-decay|m|}
/// envelope, scaled to mass `mass`.
pub fn smooth_field(grid: Grid, band: i64, decay: f64, mass: f64, seed: u64) -> FieldState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![Complex64::new(0.0, 0.0); grid.modes()];
    for m in -band..=band {
        let env = (-decay * m.abs() as f64).exp();
        let z = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * env;
        c[grid.index(m).unwrap()] = z;
    }
    let q = FieldState::from_coefficients(grid, c).unwrap();
    let s = (mass / q.mass()).sqrt();
    q.scaled(Complex64::new(s, 0.0))
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
