//! α(κ;q) = Σ_{ℓ≥1} tr((iκΛΓ)^ℓ)/ℓ.
//!
//! The ℓ = 1, 2 terms use the exact closed forms; higher terms come from the
//! section. Refused outside the guard √κ‖Λ‖_op < ½.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::closed::LowOrderTraces;
use super::kernel::Section;
use super::window::Window;
use crate::error::Result;
use crate::linalg;
use crate::spectral::FieldState;

pub const GUARD: f64 = 0.5;

/// Hard cap on the number of series terms.
const MAX_TERMS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum AlphaSeries {
    Converged {
        value: Complex64,
        terms: usize,
        guard: f64,
        window: Window,
    },
    Diverged {
        guard: f64,
    },
}

impl AlphaSeries {
    pub fn value(&self) -> Option<Complex64> {
        match self {
            AlphaSeries::Converged { value, .. } => Some(*value),
            AlphaSeries::Diverged { .. } => None,
        }
    }

    pub fn guard(&self) -> f64 {
        match self {
            AlphaSeries::Converged { guard, .. } | AlphaSeries::Diverged { guard } => *guard,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, AlphaSeries::Converged { .. })
    }
}

/// Trace-norm majorant of the ℓ-th term: κ^{ℓ+1}‖Λ‖²_HS‖Λ‖_op^{2ℓ}, in logs.
fn log_majorant(kappa: f64, hs: f64, op: f64, l: usize) -> f64 {
    (l as f64 + 1.0) * kappa.ln() + 2.0 * hs.ln() + 2.0 * l as f64 * op.ln()
}

/// Series on a prepared section. `tol` bounds the first omitted majorant.
pub fn alpha_series_on_section(section: &Section, low: &LowOrderTraces, tol: f64) -> AlphaSeries {
    let kappa = section.kappa();
    let op = section.lambda.op_norm();
    let guard = kappa.sqrt() * op;
    if guard >= GUARD {
        return AlphaSeries::Diverged { guard };
    }
    let window = *section.window();
    let mut value = low.t1 + 0.5 * low.t2;
    let hs = section.lambda.hs_norm();
    if hs == 0.0 {
        return AlphaSeries::Converged {
            value,
            terms: 2,
            guard,
            window,
        };
    }
    let log_tol = tol.ln();
    let a = &section.a;
    let band = section.band();
    let mut power = linalg::band_mul(a, band, a, band);
    let mut power_band = linalg::band_sum(band, band);
    let mut terms = 2;
    for l in 3..=MAX_TERMS {
        if log_majorant(kappa, hs, op, l) < log_tol {
            break;
        }
        value += linalg::trace_of_product(&power, a) / l as f64;
        terms = l;
        power = linalg::band_mul(&power, power_band, a, band);
        power_band = linalg::band_sum(power_band, band).filter(|&b| b < a.nrows());
    }
    AlphaSeries::Converged {
        value,
        terms,
        guard,
        window,
    }
}

pub fn alpha_series(q: &FieldState, kappa: f64, window: &Window, tol: f64) -> Result<AlphaSeries> {
    let section = Section::new(q, kappa, window)?;
    Ok(alpha_series_on_section(&section, &LowOrderTraces::new(q, kappa), tol))
}
