//! Closed forms for the first two trace terms.
//!
//! With weights w_m = L|c_m|² and S_w = Σ_m w_m/(2κ − iξ_m):
//!
//! * tr(iκΛΓ) = coth(κL/2) Σ_m iκ w_m/(2κ − iξ_m)
//! * tr((ΛΓ)²) = coth(κL/2) ∫ v² (4κ−∂)(u²) dx + ½ csch²(κL/2) S_w²
//!
//! where u = (2κ−∂)^{-1}q and v = (2κ+∂)^{-1}q̄. The csch² term comes from
//! the double poles of the lattice sum at zero total frequency; it vanishes
//! on the line and is exponentially small once κL is large.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{transform, FieldState};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Torus,
    Line,
}

impl Geometry {
    /// Line emulation when L ≥ 32 and all but 1e-8 of the mass sits in the
    /// central half of the box.
    pub fn detect(q: &FieldState) -> Self {
        let g = q.grid();
        if g.period() < 32.0 {
            return Geometry::Torus;
        }
        let total = q.physical_mass();
        if total == 0.0 {
            return Geometry::Line;
        }
        let (lo, hi) = (0.25 * g.period(), 0.75 * g.period());
        let inner: f64 = (0..g.modes())
            .filter(|&j| {
                let x = g.point(j);
                x >= lo && x <= hi
            })
            .map(|j| q.samples()[j].norm_sqr())
            .sum::<f64>()
            * g.dx();
        if inner >= (1.0 - 1e-8) * total {
            Geometry::Line
        } else {
            Geometry::Torus
        }
    }
}

/// coth(κL/2), the torus prefactor.
pub fn torus_factor(kappa: f64, period: f64) -> f64 {
    1.0 / (0.5 * kappa * period).tanh()
}

/// csch²(κL/2).
pub fn csch2(kappa: f64, period: f64) -> f64 {
    let s = (0.5 * kappa * period).sinh();
    if s.is_infinite() {
        0.0
    } else {
        1.0 / (s * s)
    }
}

pub fn prefactor(kappa: f64, period: f64, geometry: Geometry) -> f64 {
    match geometry {
        Geometry::Torus => torus_factor(kappa, period),
        Geometry::Line => 1.0,
    }
}

/// S_w = Σ_m L|c_m|²/(2κ − iξ_m).
pub fn weighted_resolvent_sum(q: &FieldState, kappa: f64) -> Complex64 {
    let g = q.grid();
    q.coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| g.period() * c.norm_sqr() / Complex64::new(2.0 * kappa, -g.frequency(i)))
        .sum()
}

/// Exact torus value of tr(iκΛΓ).
pub fn trace_quadratic_torus(q: &FieldState, kappa: f64) -> Complex64 {
    I * kappa * torus_factor(kappa, q.grid().period()) * weighted_resolvent_sum(q, kappa)
}

/// tr(iκΛΓ) with the prefactor of the detected geometry.
pub fn trace_quadratic(q: &FieldState, kappa: f64) -> Complex64 {
    let geom = Geometry::detect(q);
    I * kappa * prefactor(kappa, q.grid().period(), geom) * weighted_resolvent_sum(q, kappa)
}

/// u = (2κ−∂)^{-1}q and v = (2κ+∂)^{-1}q̄ as coefficient vectors on the field's grid.
pub fn resolvent_pair(q: &FieldState, kappa: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let g = q.grid();
    let n = g.modes();
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let m = g.wavenumber(i);
        let xi = g.frequency(i);
        u.push(q.coefficient(m) / Complex64::new(2.0 * kappa, -xi));
        v.push(q.conj_coefficient(m) / Complex64::new(2.0 * kappa, xi));
    }
    (u, v)
}

const PAD: usize = 4;

/// ∫₀ᴸ v² (4κ−∂)(u²) dx, evaluated exactly on a 4× padded grid.
pub fn paraproduct_integral(q: &FieldState, kappa: f64) -> Complex64 {
    let g = q.grid();
    let (u, v) = resolvent_pair(q, kappa);
    let np = PAD * g.modes();
    let us = transform::padded_samples(&u, PAD);
    let vs = transform::padded_samples(&v, PAD);
    let u2: Vec<Complex64> = us.iter().map(|z| z * z).collect();
    let mut w = transform::forward(&u2);
    for (i, c) in w.iter_mut().enumerate() {
        let m = if i < np / 2 { i as i64 } else { i as i64 - np as i64 };
        *c *= Complex64::new(4.0 * kappa, -(m as f64) * g.dxi());
    }
    let ws = transform::inverse(&w);
    let sum: Complex64 = vs.iter().zip(&ws).map(|(v, w)| v * v * w).sum();
    sum * (g.period() / np as f64)
}

/// Exact torus value of tr((ΛΓ)²).
pub fn trace_quartic_torus(q: &FieldState, kappa: f64) -> Complex64 {
    let l = q.grid().period();
    let sw = weighted_resolvent_sum(q, kappa);
    torus_factor(kappa, l) * paraproduct_integral(q, kappa) + 0.5 * csch2(kappa, l) * sw * sw
}

/// tr((ΛΓ)²) for the detected geometry (line: bare paraproduct integral).
pub fn trace_quartic(q: &FieldState, kappa: f64) -> Complex64 {
    match Geometry::detect(q) {
        Geometry::Torus => trace_quartic_torus(q, kappa),
        Geometry::Line => paraproduct_integral(q, kappa),
    }
}

/// The two closed-form terms feeding the tail completion:
/// T1 = tr(iκΛΓ) and T2 = tr((iκΛΓ)²), both exact on the torus.
#[derive(Clone, Copy, Debug)]
pub struct LowOrderTraces {
    pub t1: Complex64,
    pub t2: Complex64,
}

impl LowOrderTraces {
    pub fn new(q: &FieldState, kappa: f64) -> Self {
        Self {
            t1: trace_quadratic_torus(q, kappa),
            t2: -kappa * kappa * trace_quartic_torus(q, kappa),
        }
    }
}
