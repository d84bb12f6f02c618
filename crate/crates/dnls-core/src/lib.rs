//! Numerical laboratory for the perturbation determinant of the derivative
//! nonlinear Schrödinger equation.

pub mod error;
pub mod experiments;
pub mod flows;
pub mod gradients;
pub mod io;
pub mod lax;
pub mod linalg;
pub mod spectral;

pub use error::{Error, Result};
pub use lax::{KappaSet, KernelMatrix, SpectralScan};
pub use spectral::{FieldState, Grid};
