//! Finite sections of Λ(q), Γ(q), closed-form traces, the perturbation
//! determinant, the α series and the β family.

pub mod banded;
pub mod beta;
pub mod closed;
pub mod determinant;
pub mod exterior;
pub mod hs;
pub mod kappa;
pub mod kernel;
pub mod scan;
pub mod series;
pub mod window;

pub use beta::{beta2, beta_functionals, beta_s2, beta_s_weight, knorm, knorm_sq, BetaPair};
pub use closed::{trace_quadratic, trace_quartic, Geometry, LowOrderTraces};
pub use determinant::{perturbation_determinant, Determinant, DeterminantOptions};
pub use hs::hs_norm_sq_closed_form;
pub use kappa::KappaSet;
pub use kernel::{build_gamma, build_lambda, op_norm, KernelKind, KernelMatrix, Section};
pub use scan::{det_vs_exptr_sum, spectral_scan, ScanRow, SpectralScan};
pub use series::{alpha_series, AlphaSeries};
pub use window::{Window, WindowPolicy};
