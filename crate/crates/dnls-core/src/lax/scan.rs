//! κ-sweeps: the SpectralScan table and the det-vs-trace sum.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::beta::beta_functionals;
use super::closed::{trace_quartic_torus, LowOrderTraces};
use super::determinant::{perturbation_determinant, DeterminantOptions};
use super::hs::hs_norm_sq_closed_form;
use super::kappa::KappaSet;
use super::kernel::Section;
use super::series::alpha_series_on_section;
use crate::error::Result;
use crate::io::{fmt_f64, CsvTable};
use crate::spectral::FieldState;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub kappa: f64,
    pub a: Complex64,
    pub alpha: Option<Complex64>,
    /// tr(iκΛΓ)
    pub trace2: Complex64,
    /// tr((ΛΓ)²)
    pub trace4: Complex64,
    /// ‖Λ‖_HS of the full operator
    pub hsnorm: f64,
    /// ‖Λ‖_op of the accepted section
    pub opnorm: f64,
    pub beta: Option<f64>,
    pub beta2: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralScan {
    pub rows: Vec<ScanRow>,
}

pub const SCAN_COLUMNS: [&str; 12] = [
    "kappa", "re_a", "im_a", "re_alpha", "im_alpha", "re_tr2", "im_tr2", "hsnorm", "opnorm", "beta2",
    "beta", "converged",
];

/// Series tolerance used by scans.
pub const SERIES_TOL: f64 = 1e-14;

/// One κ row. The determinant comes from band-stored sections at Ξ and 2Ξ;
/// the α series and ‖Λ‖_op use a dense section at Ξ (clipped to the dense
/// cap, which only affects the ℓ ≥ 3 tails).
pub fn scan_row(q: &FieldState, kappa: f64, options: &DeterminantOptions) -> Result<ScanRow> {
    let a = perturbation_determinant(q, kappa, options)?.value;
    let low = LowOrderTraces::new(q, kappa);
    let window = options.policy.window(q, kappa)?.dense_clipped();
    let section = Section::new(q, kappa, &window)?;
    let series = alpha_series_on_section(&section, &low, SERIES_TOL);
    let alpha = series.value();
    let beta = beta_functionals(q, kappa, alpha);
    Ok(ScanRow {
        kappa,
        a,
        alpha,
        trace2: low.t1,
        trace4: trace_quartic_torus(q, kappa),
        hsnorm: hs_norm_sq_closed_form(q, kappa).sqrt(),
        opnorm: section.lambda.op_norm(),
        beta: beta.beta,
        beta2: beta.beta2,
    })
}

/// Rows are computed in parallel and returned in κ order.
pub fn spectral_scan(q: &FieldState, kappas: &KappaSet, options: &DeterminantOptions) -> Result<SpectralScan> {
    let rows = kappas
        .as_slice()
        .par_iter()
        .map(|&k| scan_row(q, k, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralScan { rows })
}

impl SpectralScan {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&SCAN_COLUMNS);
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        for r in &self.rows {
            t.push_raw(vec![
                fmt_f64(r.kappa),
                fmt_f64(r.a.re),
                fmt_f64(r.a.im),
                opt(r.alpha.map(|a| a.re)),
                opt(r.alpha.map(|a| a.im)),
                fmt_f64(r.trace2.re),
                fmt_f64(r.trace2.im),
                fmt_f64(r.hsnorm),
                fmt_f64(r.opnorm),
                fmt_f64(r.beta2),
                opt(r.beta),
                if r.alpha.is_some() { "1" } else { "0" }.to_string(),
            ]);
        }
        t
    }
}

/// Σ_{κ∈𝒦} |a(κ;q) − exp(−tr(iκΛΓ))|.
///
/// Since log a = −Σ tr(A^ℓ)/ℓ, the first-order comparison is against
/// exp(−tr A); the remainder is O(‖A‖²_HS) and summable over dyadic κ.
pub fn det_vs_exptr_sum(q: &FieldState, kappas: &KappaSet, options: &DeterminantOptions) -> Result<f64> {
    let terms = kappas
        .as_slice()
        .par_iter()
        .map(|&k| {
            let a = perturbation_determinant(q, k, options)?.value;
            let t1 = LowOrderTraces::new(q, k).t1;
            Ok((a - (-t1).exp()).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum())
}
