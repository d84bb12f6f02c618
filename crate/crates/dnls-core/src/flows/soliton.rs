//! Periodic algebraic soliton of the derivative NLS.
//!
//! With k = 2π/L and coth β = 3 + 2j, the density
//!   ρ(x) = 2k sinh β / (cosh β − cos kx)
//! carries mass exactly 4π. The phase θ = vx/2 − 3ψ with v = k coth β and
//!   ψ(x) = kx/2 + atan((c − 1) s·co / (co² + c s²)),  c = coth(β/2),
//! s = sin(kx/2), co = cos(kx/2), is the Kaup–Newell phase of a traveling
//! wave ρ(x − vt); the branch condition on β makes e^{iθ} L-periodic.
//! As L → ∞ this reduces to the algebraic soliton 4/(1 + x²)-type profile.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{make_field, FieldState, Grid};

/// coth β for branch `j`.
pub fn branch_coth(branch: u32) -> f64 {
    3.0 + 2.0 * branch as f64
}

/// Sample the soliton centred at x = 0 (peak of ρ) on `grid`.
pub fn algebraic_soliton(grid: Grid, branch: u32) -> Result<FieldState> {
    soliton_profile(grid, branch_coth(branch))
}

/// The profile for an arbitrary coth β > 1; periodic only on a branch.
pub fn soliton_profile(grid: Grid, cb: f64) -> Result<FieldState> {
    if !(cb > 1.0 && cb.is_finite()) {
        return Err(Error::Parameter(format!("coth beta must exceed 1, got {cb}")));
    }
    let l = grid.period();
    let k = 2.0 * std::f64::consts::PI / l;
    let beta = (1.0 / cb).atanh();
    let c = 1.0 / (0.5 * beta).tanh();
    let v = k * cb;
    make_field(grid, |x| {
        let rho = 2.0 * k * beta.sinh() / (beta.cosh() - (k * x).cos());
        let (s, co) = (0.5 * k * x).sin_cos();
        let psi = 0.5 * k * x + ((c - 1.0) * s * co).atan2(co * co + c * s * s);
        let theta = 0.5 * v * x - 3.0 * psi;
        Complex64::from_polar(rho.sqrt(), theta)
    })
}
