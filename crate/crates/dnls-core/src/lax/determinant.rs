//! a(κ;q) = det(1 − iκΛΓ) from tail-completed finite sections.
//!
//! A bare section det(1 − A_W) misses the exterior of the window at rate
//! O(κ/Ξ), dominated by the first two trace terms. Those are known exactly
//! (see [`super::closed`]), so the section is completed as
//!
//!   a ≈ det(1 − A_W) · exp(−(T1 − tr A_W) − ½(T2 − tr A_W²)),
//!
//! leaving only the tails of tr A^ℓ for ℓ ≥ 3.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::banded::BandedSection;
use super::closed::LowOrderTraces;
use super::kernel::Section;
use super::window::{Window, WindowPolicy};
use crate::error::{Error, Result};
use crate::linalg;
use crate::spectral::FieldState;

/// Completed determinant on one window.
#[derive(Clone, Copy, Debug)]
pub struct CompletedSection {
    pub window: Window,
    /// det(1 − A_W) without completion.
    pub bare: Complex64,
    pub trace_a: Complex64,
    pub trace_a2: Complex64,
    pub value: Complex64,
}

pub fn completion_factor(low: &LowOrderTraces, trace_a: Complex64, trace_a2: Complex64) -> Complex64 {
    (-(low.t1 - trace_a) - 0.5 * (low.t2 - trace_a2)).exp()
}

pub fn completed_section(section: &Section, low: &LowOrderTraces) -> CompletedSection {
    let trace_a = section.trace_a();
    let trace_a2 = section.trace_a2();
    let bare = linalg::determinant(linalg::one_minus(&section.a));
    CompletedSection {
        window: *section.window(),
        bare,
        trace_a,
        trace_a2,
        value: bare * completion_factor(low, trace_a, trace_a2),
    }
}

/// Same completion, computed in band storage.
pub fn completed_banded(section: &BandedSection, low: &LowOrderTraces) -> CompletedSection {
    let trace_a = section.a.trace();
    let trace_a2 = section.a.trace_square();
    let bare = section.determinant();
    CompletedSection {
        window: section.window,
        bare,
        trace_a,
        trace_a2,
        value: bare * completion_factor(low, trace_a, trace_a2),
    }
}

/// Completed determinant on a given window.
pub fn determinant_on_window(q: &FieldState, kappa: f64, window: &Window) -> Result<CompletedSection> {
    let section = BandedSection::new(q, kappa, window)?;
    Ok(completed_banded(&section, &LowOrderTraces::new(q, kappa)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeterminantOptions {
    pub policy: WindowPolicy,
    /// Relative agreement required between windows Ξ and 2Ξ.
    pub tolerance: f64,
}

impl Default for DeterminantOptions {
    fn default() -> Self {
        Self {
            policy: WindowPolicy::default(),
            tolerance: 1e-8,
        }
    }
}

/// Accepted value of a(κ;q) together with its cross-window evidence.
#[derive(Clone, Copy, Debug)]
pub struct Determinant {
    pub value: Complex64,
    pub coarse: CompletedSection,
    pub fine: CompletedSection,
}

impl Determinant {
    pub fn window_discrepancy(&self) -> f64 {
        (self.fine.value - self.coarse.value).norm()
    }
}

/// a(κ;q) evaluated at the policy window Ξ and at 2Ξ; accepted when the two
/// completed values agree to `tolerance` relative (absolute below 1e-12).
pub fn perturbation_determinant(
    q: &FieldState,
    kappa: f64,
    options: &DeterminantOptions,
) -> Result<Determinant> {
    let coarse_w = options.policy.window(q, kappa)?;
    let fine_w = coarse_w.scaled(2)?;
    let low = LowOrderTraces::new(q, kappa);
    let coarse = completed_banded(&BandedSection::new(q, kappa, &coarse_w)?, &low);
    let fine = completed_banded(&BandedSection::new(q, kappa, &fine_w)?, &low);
    let gap = (fine.value - coarse.value).norm();
    if gap > options.tolerance * fine.value.norm().max(1e-12 / options.tolerance.max(1e-300)) {
        return Err(Error::Truncation {
            coarse: coarse.value,
            fine: fine.value,
            coarse_width: coarse_w.half_width(),
            fine_width: fine_w.half_width(),
            tolerance: options.tolerance,
        });
    }
    Ok(Determinant {
        value: fine.value,
        coarse,
        fine,
    })
}
