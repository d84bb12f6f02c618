use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("symbol is singular or non-finite at frequency {xi}")]
    SingularSymbol { xi: f64 },

    #[error("invalid window: {0}")]
    Window(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error(
        "window truncation not converged: coarse {coarse} (half-width {coarse_width}) vs fine {fine} (half-width {fine_width}), tolerance {tolerance:e}"
    )]
    Truncation {
        coarse: Complex64,
        fine: Complex64,
        coarse_width: usize,
        fine_width: usize,
        tolerance: f64,
    },

    #[error("guard failed: sqrt(kappa)*||Lambda||_op = {guard} >= 1/2 at kappa = {kappa}")]
    Guard { kappa: f64, guard: f64 },

    #[error("singular resolvent at kappa = {kappa} (condition estimate {condition:e})")]
    SingularResolvent { kappa: f64, condition: f64 },

    #[error("resolution lost at t = {time}: top-octave mass fraction {fraction:e}")]
    ResolutionLoss { time: f64, fraction: f64 },

    #[error("step instability (non-finite state) at t = {time}")]
    Instability { time: f64 },

    #[error("unstable step: dt * nonlinear rate = {product} exceeds 1")]
    StepGuard { product: f64 },

    #[error("ensemble construction failed: {0}")]
    Ensemble(String),

    #[error("unknown experiment {name:?}; available: {}", available.join(", "))]
    UnknownExperiment { name: String, available: Vec<String> },

    #[error("snapshot format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
