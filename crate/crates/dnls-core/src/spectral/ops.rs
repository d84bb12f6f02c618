use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::FieldState;
use crate::error::{Error, Result};

/// Fourier multipliers used throughout. Half powers take the principal
/// branch, which is the continuous branch with √κ > 0 because Re(κ ± iξ) = κ > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symbol {
    Identity,
    /// (κ − iξ)^{-1/2}, the symbol of (κ − ∂)^{-1/2}.
    HalfResolventMinus(f64),
    /// (κ + iξ)^{-1/2}.
    HalfResolventPlus(f64),
    /// (2κ − iξ)^{-1}.
    ResolventMinus(f64),
    /// (2κ + iξ)^{-1}.
    ResolventPlus(f64),
    /// ξ², the symbol of −∂².
    Laplacian,
    /// iξ.
    Derivative,
}

impl Symbol {
    pub fn eval(&self, xi: f64) -> Complex64 {
        match *self {
            Symbol::Identity => Complex64::new(1.0, 0.0),
            Symbol::HalfResolventMinus(k) => half_resolvent(k, -xi),
            Symbol::HalfResolventPlus(k) => half_resolvent(k, xi),
            Symbol::ResolventMinus(k) => Complex64::new(2.0 * k, -xi).inv(),
            Symbol::ResolventPlus(k) => Complex64::new(2.0 * k, xi).inv(),
            Symbol::Laplacian => Complex64::new(xi * xi, 0.0),
            Symbol::Derivative => Complex64::new(0.0, xi),
        }
    }
}

/// (κ + iξ)^{-1/2} on the principal branch.
pub fn half_resolvent(kappa: f64, xi: f64) -> Complex64 {
    Complex64::new(kappa, xi).sqrt().inv()
}

/// Multiply coefficients by `symbol(ξ)`.
pub fn apply_multiplier<F>(q: &FieldState, symbol: F) -> Result<FieldState>
where
    F: Fn(f64) -> Complex64,
{
    let g = *q.grid();
    let mut out = Vec::with_capacity(g.modes());
    for (i, c) in q.coefficients().iter().enumerate() {
        let xi = g.frequency(i);
        let s = symbol(xi);
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(Error::SingularSymbol { xi });
        }
        out.push(s * c);
    }
    FieldState::from_coefficients(g, out)
}

pub fn apply_symbol(q: &FieldState, symbol: Symbol) -> Result<FieldState> {
    apply_multiplier(q, |xi| symbol.eval(xi))
}

/// Spectral derivative q′.
pub fn derivative(q: &FieldState) -> FieldState {
    apply_symbol(q, Symbol::Derivative).expect("finite symbol")
}

/// (Σ_ξ (1+ξ²)^s L|c(ξ)|²)^{1/2}; on the unit torus this is the usual H^s norm.
pub fn sobolev_norm(q: &FieldState, s: f64) -> f64 {
    let g = q.grid();
    let sum: f64 = q
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let xi = g.frequency(i);
            (1.0 + xi * xi).powf(s) * c.norm_sqr()
        })
        .sum();
    (g.period() * sum).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Keep |ξ| > cutoff.
    Above,
    /// Keep |ξ| ≤ cutoff.
    Below,
}

pub fn frequency_restrict(q: &FieldState, cutoff: f64, side: Side) -> Result<FieldState> {
    if !(cutoff > 0.0) {
        return Err(Error::Parameter(format!("cutoff must be positive, got {cutoff}")));
    }
    apply_multiplier(q, |xi| {
        let keep = match side {
            Side::Above => xi.abs() > cutoff,
            Side::Below => xi.abs() <= cutoff,
        };
        Complex64::new(if keep { 1.0 } else { 0.0 }, 0.0)
    })
}

fn glue(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth even bump: 1 on [−1, 1], 0 outside (−2, 2).
pub fn lp_bump(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let u = glue(2.0 - a);
        u / (u + glue(a - 1.0))
    }
}

/// Littlewood–Paley pieces (N, q_N) for N = 1, 2, 4, …, up to the first N
/// with ψ(ξ/N) ≡ 1 on the grid, so the pieces sum to q.
///
/// q_1 = ψ(ξ) q̂ and q_N = (ψ(ξ/N) − ψ(2ξ/N)) q̂ for N ≥ 2.
pub fn littlewood_paley(q: &FieldState) -> Vec<(u64, FieldState)> {
    let top = q.grid().max_frequency();
    let mut out = Vec::new();
    out.push((1u64, apply_multiplier(q, |xi| Complex64::new(lp_bump(xi), 0.0)).unwrap()));
    let mut n = 2u64;
    loop {
        let nf = n as f64;
        let piece = apply_multiplier(q, |xi| {
            Complex64::new(lp_bump(xi / nf) - lp_bump(2.0 * xi / nf), 0.0)
        })
        .unwrap();
        out.push((n, piece));
        if nf >= top {
            break;
        }
        n *= 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn branch_at_zero() {
        let s = Symbol::HalfResolventMinus(4.0).eval(0.0);
        assert!((s - 0.5).norm() < 1e-15);
    }

    #[test]
    fn product_of_half_resolvents() {
        for &xi in &[-40.0, -3.0, 0.0, 2.5, 100.0] {
            let k = 3.0;
            let p = Symbol::HalfResolventMinus(k).eval(xi) * Symbol::HalfResolventPlus(k).eval(xi);
            let want = 1.0 / (k * k + xi * xi).sqrt();
            assert!((p - want).norm() < 1e-15 * want.max(1.0));
        }
    }

    #[test]
    fn lp_single_mode_in_at_most_two_pieces() {
        // period 2π puts wavenumbers on the integers
        let g = Grid::new(512, 2.0 * PI).unwrap();
        for m in [64i64, 90, 5] {
            let mut c = vec![Complex64::new(0.0, 0.0); 512];
            c[g.index(m).unwrap()] = Complex64::new(1.0, 0.0);
            let q = FieldState::from_coefficients(g, c).unwrap();
            let pieces = littlewood_paley(&q);
            let nonzero: Vec<u64> = pieces
                .iter()
                .filter(|(_, p)| p.coefficients().iter().any(|c| c.norm() > 0.0))
                .map(|(n, _)| *n)
                .collect();
            assert!(!nonzero.is_empty() && nonzero.len() <= 2, "{m}: {nonzero:?}");
            if nonzero.len() == 2 {
                assert_eq!(nonzero[1], 2 * nonzero[0]);
            }
            let total: Complex64 = pieces.iter().map(|(_, p)| p.coefficient(m)).sum();
            assert!((total - 1.0).norm() < 1e-15);
        }
    }
}
