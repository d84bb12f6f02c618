//! M, H, H₂ and the κ-probes recorded along trajectories.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lax::{beta2, perturbation_determinant, DeterminantOptions, KappaSet};
use crate::spectral::product::padded_integral;
use crate::spectral::{derivative, FieldState};

/// Padding that keeps sextic integrands alias-free on the zero mode.
const PAD: usize = 4;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn mass(q: &FieldState) -> f64 {
    q.mass()
}

/// H(q) = −½ ∫ i(q q̄′ − q̄ q′) + |q|⁴ dx.
pub fn hamiltonian(q: &FieldState) -> f64 {
    let l = q.grid().period();
    let qb = q.conj();
    let (dq, dqb) = (derivative(q), derivative(&qb));
    let (c, cb, d, db) = (q.coefficients(), qb.coefficients(), dq.coefficients(), dqb.coefficients());
    let momentum = padded_integral(&[c, db], PAD, l) - padded_integral(&[cb, d], PAD, l);
    let quartic = padded_integral(&[c, c, cb, cb], PAD, l);
    (-0.5 * (I * momentum + quartic)).re
}

/// H₂(q) = ∫ |q′|² + ¾ i|q|²(q q̄′ − q̄ q′) + ½|q|⁶ dx.
pub fn hamiltonian2(q: &FieldState) -> f64 {
    let l = q.grid().period();
    let qb = q.conj();
    let (dq, dqb) = (derivative(q), derivative(&qb));
    let (c, cb, d, db) = (q.coefficients(), qb.coefficients(), dq.coefficients(), dqb.coefficients());
    let kinetic = padded_integral(&[d, db], PAD, l);
    let mixed = padded_integral(&[c, cb, c, db], PAD, l) - padded_integral(&[c, cb, cb, d], PAD, l);
    let sextic = padded_integral(&[c, c, c, cb, cb, cb], PAD, l);
    (kinetic + 0.75 * I * mixed + 0.5 * sextic).re
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub kappa: f64,
    pub a: Complex64,
    pub beta2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservedReport {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    pub probes: Vec<ProbeReport>,
}

impl ConservedReport {
    pub fn a_at(&self, kappa: f64) -> Option<Complex64> {
        self.probes.iter().find(|p| p.kappa == kappa).map(|p| p.a)
    }

    pub fn beta2_at(&self, kappa: f64) -> Option<f64> {
        self.probes.iter().find(|p| p.kappa == kappa).map(|p| p.beta2)
    }
}

pub fn conserved_report(q: &FieldState, kappas: &KappaSet, options: &DeterminantOptions) -> Result<ConservedReport> {
    let probes = kappas
        .as_slice()
        .par_iter()
        .map(|&kappa| {
            Ok(ProbeReport {
                kappa,
                a: perturbation_determinant(q, kappa, options)?.value,
                beta2: beta2(q, kappa),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConservedReport {
        m: mass(q),
        h: hamiltonian(q),
        h2: hamiltonian2(q),
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_field, Grid};

    #[test]
    fn constant_field() {
        let c = Complex64::new(0.6, -0.5);
        let q = make_field(Grid::unit(16).unwrap(), |_| c).unwrap();
        let m = c.norm_sqr();
        assert!((mass(&q) - m).abs() < 1e-15);
        assert!((hamiltonian(&q) + 0.5 * m * m).abs() < 1e-15);
        assert!((hamiltonian2(&q) - 0.5 * m * m * m).abs() < 1e-15);
        let r = conserved_report(&FieldState::zeros(Grid::unit(16).unwrap()), &KappaSet::dyadic(0, 2), &DeterminantOptions::default())
            .unwrap();
        assert!(r.probes.iter().all(|p| p.a == Complex64::new(1.0, 0.0)));
        assert_eq!((r.m, r.h, r.h2), (0.0, 0.0, 0.0));
    }
}
