use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{grad_alpha, GradientFields};
use crate::error::Result;
use crate::lax::closed::torus_factor;
use crate::lax::window::Window;
use crate::spectral::product::padded_product;
use crate::spectral::{derivative, FieldState};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// L² norms of the three differential identities satisfied by the gradients:
///
/// * r1 = ‖(δα/δq̄)′ − 2κ δα/δq̄ + iκ q (γ + c)‖
/// * r2 = ‖(δα/δq)′ + 2κ δα/δq − iκ q̄ (γ + c)‖
/// * r3 = ‖γ′ − 2q̄ δα/δq̄ + 2q δα/δq‖
///
/// with c = coth(κL/2), the diagonal value of (κ−∂)^{-1} + (κ+∂)^{-1}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3)
    }
}

fn combine(terms: &[(Complex64, &[Complex64])]) -> Vec<Complex64> {
    let n = terms[0].1.len();
    (0..n).map(|i| terms.iter().map(|(s, v)| s * v[i]).sum()).collect()
}

pub fn residuals_of(q: &FieldState, kappa: f64, f: &GradientFields) -> Result<IdentityResiduals> {
    let g = *q.grid();
    let c = torus_factor(kappa, g.period());
    let mut shifted = f.gamma.coefficients().to_vec();
    shifted[0] += c;
    let qb = q.conj();
    let q_g = padded_product(&[q.coefficients(), &shifted], 2);
    let qb_g = padded_product(&[qb.coefficients(), &shifted], 2);
    let qb_dqb = padded_product(&[qb.coefficients(), f.dqbar.coefficients()], 2);
    let q_dq = padded_product(&[q.coefficients(), f.dq.coefficients()], 2);
    let d_dqb = derivative(&f.dqbar);
    let d_dq = derivative(&f.dq);
    let d_gamma = derivative(&f.gamma);
    let one = Complex64::new(1.0, 0.0);
    let k = Complex64::new(kappa, 0.0);
    let r1 = combine(&[
        (one, d_dqb.coefficients()),
        (-2.0 * k, f.dqbar.coefficients()),
        (I * k, &q_g),
    ]);
    let r2 = combine(&[(one, d_dq.coefficients()), (2.0 * k, f.dq.coefficients()), (-I * k, &qb_g)]);
    let r3 = combine(&[(one, d_gamma.coefficients()), (-2.0 * one, &qb_dqb), (2.0 * one, &q_dq)]);
    let norm = |v: Vec<Complex64>| -> Result<f64> { Ok(FieldState::from_coefficients(g, v)?.l2_norm()) };
    Ok(IdentityResiduals {
        r1: norm(r1)?,
        r2: norm(r2)?,
        r3: norm(r3)?,
    })
}

/// Residuals at κ on `window`; a guard error when the resolvent is refused.
pub fn identity_residuals(q: &FieldState, kappa: f64, window: &Window) -> Result<IdentityResiduals> {
    let bundle = grad_alpha(q, kappa, window)?;
    residuals_of(q, kappa, bundle.require()?)
}
