//! β^[2], β, β_s and the 𝒦-norm.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::closed::{prefactor, Geometry};
use super::kappa::KappaSet;
use crate::error::{Error, Result};
use crate::spectral::FieldState;

/// β^[2](κ;q) = Σ_ξ ξ² L|q̂(ξ)|²/(4κ²+ξ²).
pub fn beta2(q: &FieldState, kappa: f64) -> f64 {
    let g = q.grid();
    let k2 = 4.0 * kappa * kappa;
    q.coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let xi = g.frequency(i);
            xi * xi * c.norm_sqr() / (k2 + xi * xi)
        })
        .sum::<f64>()
        * g.period()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaPair {
    pub beta2: f64,
    /// Absent when the α series was refused.
    pub beta: Option<f64>,
}

/// β = ‖q‖² − 2 Im α / prefactor, with the geometry's prefactor (coth on the
/// torus, 1 for line emulation).
pub fn beta_from_alpha(q: &FieldState, kappa: f64, alpha: Complex64) -> f64 {
    let p = prefactor(kappa, q.grid().period(), Geometry::detect(q));
    q.mass() - 2.0 * alpha.im / p
}

pub fn beta_functionals(q: &FieldState, kappa: f64, alpha: Option<Complex64>) -> BetaPair {
    BetaPair {
        beta2: beta2(q, kappa),
        beta: alpha.map(|a| beta_from_alpha(q, kappa, a)),
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 0.5 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("s must lie in (0, 1/2), got {s}")))
    }
}

/// w_s(ξ,κ) = ∫_κ^∞ ξ²/(4ϰ²+ξ²) ϰ^{2s−1} dϰ.
///
/// After ϰ = κ/t the integrand ξ²κ^{2s} t^{1−2s}/(4κ²+ξ²t²) lives on (0,1]
/// and vanishes at t = 0; tanh-sinh handles the algebraic endpoint.
pub fn beta_s_weight(xi: f64, kappa: f64, s: f64) -> Result<f64> {
    check_s(s)?;
    if xi == 0.0 {
        return Ok(0.0);
    }
    let x2 = xi * xi;
    let k2 = 4.0 * kappa * kappa;
    let scale = kappa.powf(2.0 * s);
    let f = |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            x2 * t.powf(1.0 - 2.0 * s) / (k2 + x2 * t * t)
        }
    };
    let out = quadrature::integrate(f, 0.0, 1.0, 1e-14 * f(1.0)).integral;
    Ok(scale * out)
}

/// β_s^[2](κ;q) = Σ_ξ w_s(ξ,κ) L|q̂(ξ)|².
pub fn beta_s2(q: &FieldState, kappa: f64, s: f64) -> Result<f64> {
    check_s(s)?;
    let g = q.grid();
    let mut total = 0.0;
    for (i, c) in q.coefficients().iter().enumerate() {
        let w = c.norm_sqr();
        if w > 0.0 {
            total += beta_s_weight(g.frequency(i), kappa, s)? * w;
        }
    }
    Ok(total * g.period())
}

/// ‖q‖²_𝒦 = ‖q‖² + Σ_{κ∈𝒦} β^[2](κ;q).
pub fn knorm_sq(q: &FieldState, set: &KappaSet) -> f64 {
    q.mass() + set.iter().map(|k| beta2(q, k)).sum::<f64>()
}

pub fn knorm(q: &FieldState, set: &KappaSet) -> f64 {
    knorm_sq(q, set).sqrt()
}
