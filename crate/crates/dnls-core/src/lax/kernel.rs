use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::window::Window;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::spectral::{half_resolvent, FieldState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// (κ−∂)^{-1/2} q (κ+∂)^{-1/2}
    Lambda,
    /// (κ+∂)^{-1/2} q̄ (κ−∂)^{-1/2}
    Gamma,
}

/// Finite Fourier section of Λ(q) or Γ(q).
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    pub kappa: f64,
    pub window: Window,
    pub kind: KernelKind,
    pub entries: CMatrix,
    /// Entries vanish for |row − column| > bandwidth.
    pub bandwidth: usize,
}

/// (κ − iξ)^{-1/2} and (κ + iξ)^{-1/2} along the window.
pub fn half_resolvents(kappa: f64, window: &Window) -> (Vec<Complex64>, Vec<Complex64>) {
    let xs = window.frequencies();
    let minus = xs.iter().map(|&x| half_resolvent(kappa, -x)).collect();
    let plus = xs.iter().map(|&x| half_resolvent(kappa, x)).collect();
    (minus, plus)
}

fn check(q: &FieldState, kappa: f64, window: &Window) -> Result<()> {
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::Parameter(format!("kappa must be >= 1, got {kappa}")));
    }
    if (window.spacing() - q.grid().dxi()).abs() > 1e-12 * q.grid().dxi() {
        return Err(Error::Window("window lattice does not match the grid period".into()));
    }
    Ok(())
}

/// Coefficients below this fraction of the largest one are dropped from
/// sections; they sit at the FFT roundoff floor and would only widen the band.
pub const NEGLIGIBLE: f64 = 1e-14;

/// Bandwidth of Λ and Γ on `window`: the largest |m| with a non-negligible
/// coefficient.
pub fn kernel_width(q: &FieldState, window: &Window) -> usize {
    let g = q.grid();
    let peak = q.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let width = (0..g.modes())
        .filter(|&i| q.coefficients()[i].norm() > NEGLIGIBLE * peak)
        .map(|i| g.wavenumber(i).unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    width.min(2 * window.half_width())
}

pub(crate) fn validate(q: &FieldState, kappa: f64, window: &Window) -> Result<()> {
    check(q, kappa, window)
}

fn build(q: &FieldState, kappa: f64, window: &Window, kind: KernelKind) -> Result<KernelMatrix> {
    check(q, kappa, window)?;
    if window.half_width() > Window::DENSE_MAX_HALF_WIDTH {
        return Err(Error::Window(format!(
            "dense section half-width {} exceeds the cap {}",
            window.half_width(),
            Window::DENSE_MAX_HALF_WIDTH
        )));
    }
    let n = window.len();
    let (dm, dp) = half_resolvents(kappa, window);
    let width = kernel_width(q, window);
    let coeff = |m: i64| match kind {
        KernelKind::Lambda => q.coefficient(m),
        KernelKind::Gamma => q.conj_coefficient(m),
    };
    let mut entries = CMatrix::zeros(n, n);
    for j in 0..n {
        let kj = window.wavenumber(j);
        let i0 = j.saturating_sub(width);
        let i1 = (j + width).min(n - 1);
        for i in i0..=i1 {
            let c = coeff(window.wavenumber(i) - kj);
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            entries[(i, j)] = match kind {
                KernelKind::Lambda => dm[i] * c * dp[j],
                KernelKind::Gamma => dp[i] * c * dm[j],
            };
        }
    }
    Ok(KernelMatrix {
        kappa,
        window: *window,
        kind,
        entries,
        bandwidth: width,
    })
}

/// Λ(q) on the window: entry(ξ, η) = (κ−iξ)^{-1/2} q̂(ξ−η) (κ+iη)^{-1/2}.
pub fn build_lambda(q: &FieldState, kappa: f64, window: &Window) -> Result<KernelMatrix> {
    build(q, kappa, window, KernelKind::Lambda)
}

/// Γ(q) on the window: entry(ξ, η) = (κ+iξ)^{-1/2} (q̄)^(ξ−η) (κ−iη)^{-1/2}.
pub fn build_gamma(q: &FieldState, kappa: f64, window: &Window) -> Result<KernelMatrix> {
    build(q, kappa, window, KernelKind::Gamma)
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn band(&self) -> Option<usize> {
        Some(self.bandwidth)
    }

    pub fn hs_norm(&self) -> f64 {
        linalg::frobenius(&self.entries)
    }

    /// Largest singular value (Lanczos, relative accuracy well below 1e-8).
    pub fn op_norm(&self) -> f64 {
        op_norm(self)
    }

    /// Sum of singular values of the section.
    pub fn trace_norm(&self) -> f64 {
        linalg::singular_values(&self.entries).iter().sum()
    }
}

pub fn op_norm(m: &KernelMatrix) -> f64 {
    linalg::spectral_norm(&m.entries, 1e-13)
}

/// The pair (Λ, Γ) on a common window, with the product A = iκΛΓ.
#[derive(Clone, Debug)]
pub struct Section {
    pub lambda: KernelMatrix,
    pub gamma: KernelMatrix,
    /// iκΛΓ
    pub a: CMatrix,
}

impl Section {
    pub fn new(q: &FieldState, kappa: f64, window: &Window) -> Result<Self> {
        let lambda = build_lambda(q, kappa, window)?;
        let gamma = build_gamma(q, kappa, window)?;
        let mut a = linalg::band_mul(&lambda.entries, lambda.band(), &gamma.entries, gamma.band());
        a *= Complex64::new(0.0, kappa);
        Ok(Self { lambda, gamma, a })
    }

    pub fn kappa(&self) -> f64 {
        self.lambda.kappa
    }

    pub fn window(&self) -> &Window {
        &self.lambda.window
    }

    /// Bandwidth of A.
    pub fn band(&self) -> Option<usize> {
        let b = 2 * self.lambda.bandwidth;
        if b >= self.lambda.dim() {
            None
        } else {
            Some(b)
        }
    }

    pub fn trace_a(&self) -> Complex64 {
        linalg::trace(&self.a)
    }

    pub fn trace_a2(&self) -> Complex64 {
        linalg::trace_of_product(&self.a, &self.a)
    }

    /// √κ‖Λ‖_op for the section.
    pub fn guard(&self) -> f64 {
        self.kappa().sqrt() * self.lambda.op_norm()
    }
}
