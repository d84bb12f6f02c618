use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ensemble::periodized_gaussian;
use super::report::{Check, ExperimentReport, Verdict};
use crate::error::{Error, Result};
use crate::flows::{evolve, Flow, FlowConfig, RESOLVED_START};
use crate::io::CsvTable;
use crate::lax::{perturbation_determinant, DeterminantOptions};
use crate::spectral::{FieldState, Grid};

/// Base mass allowed outside the sampled window before the torus can no
/// longer stand in for the line.
pub const LEAKAGE_MAX: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub modes: usize,
    pub period: f64,
    pub sigma: f64,
    pub mass: f64,
    pub lambdas: Vec<f64>,
    pub kappa: f64,
    pub t: f64,
    pub steps: usize,
    pub mass_tol: f64,
    pub det_tol: f64,
    pub flow_tol: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            modes: 2048,
            period: 64.0,
            sigma: 1.0,
            mass: 1.0,
            lambdas: vec![2.0, 4.0],
            kappa: 4.0,
            t: 0.01,
            steps: 100,
            mass_tol: 1e-12,
            det_tol: 1e-6,
            flow_tol: 1e-6,
        }
    }
}

/// D_λq(x) = √λ q(x_c + λ(x − x_c)), evaluated from the trigonometric series
/// and set to zero where the argument leaves the fundamental cell around x_c.
pub fn dilate(q: &FieldState, lambda: f64, centre: f64) -> Result<FieldState> {
    let g = *q.grid();
    let half = 0.5 * g.period();
    let freqs = g.frequencies();
    let samples = g
        .points()
        .into_par_iter()
        .map(|x| {
            let u = lambda * (x - centre);
            if u.abs() >= half {
                return Complex64::new(0.0, 0.0);
            }
            let y = centre + u;
            let v: Complex64 = q
                .coefficients()
                .iter()
                .zip(&freqs)
                .map(|(c, xi)| c * Complex64::from_polar(1.0, xi * y))
                .sum();
            v * lambda.sqrt()
        })
        .collect();
    FieldState::from_samples(g, samples)
}

/// Mass of q outside |x − x_c| < r, measured on the periodic cell.
fn mass_outside(q: &FieldState, centre: f64, radius: f64) -> f64 {
    let g = q.grid();
    let l = g.period();
    q.samples()
        .iter()
        .zip(g.points())
        .filter(|(_, x)| {
            let d = (x - centre).rem_euclid(l);
            d.min(l - d) >= radius
        })
        .map(|(z, _)| z.norm_sqr())
        .sum::<f64>()
        * g.dx()
}

/// Scaling covariance under D_λ: mass invariance, a(κ; D_λq) = a(κ/λ; q)
/// and Φ_t(D_λq₀) = D_λ Φ_{λ²t}(q₀).
pub fn scaling_covariance(cfg: &ScalingConfig) -> Result<ExperimentReport> {
    if cfg.lambdas.iter().any(|&l| !(l >= 1.0)) || cfg.steps == 0 {
        return Err(Error::Parameter("lambdas must be >= 1 and steps >= 1".into()));
    }
    let mut report = ExperimentReport::new("scaling_covariance", serde_json::to_value(cfg)?);
    let grid = Grid::new(cfg.modes, cfg.period)?;
    let centre = 0.5 * cfg.period;
    let q0 = periodized_gaussian(grid, cfg.sigma, cfg.mass, centre, 0.0)?;
    let lam_max = cfg.lambdas.iter().copied().fold(1.0, f64::max);
    let leak = mass_outside(&q0, centre, 0.5 * cfg.period / lam_max);
    report.record("leakage", leak);
    if leak > LEAKAGE_MAX {
        report.mark(Verdict::Inconclusive, "base profile is not localized inside the dilation window");
        return Ok(report);
    }
    let options = DeterminantOptions::default();
    let mut table = CsvTable::new(&["lambda", "mass_error", "det_error", "flow_error"]);
    let (mut worst_m, mut worst_d, mut worst_f) = (0.0f64, 0.0f64, 0.0f64);
    for &lambda in &cfg.lambdas {
        let dq = dilate(&q0, lambda, centre)?;
        if dq.top_octave_fraction() > RESOLVED_START {
            report.mark(Verdict::Inconclusive, format!("dilation by {lambda} is not resolved on the grid"));
            return Ok(report);
        }
        let m_err = (dq.mass() - q0.mass()).abs();

        let a_scaled = perturbation_determinant(&dq, cfg.kappa, &options)?.value;
        let a_base = perturbation_determinant(&q0, cfg.kappa / lambda, &options)?.value;
        let d_err = (a_scaled - a_base).norm() / a_base.norm();

        let dt = cfg.t / cfg.steps as f64;
        let fc = FlowConfig::new(Flow::Dnls, dt, cfg.t).with_stride(cfg.steps);
        let lhs = evolve(&dq, &fc)?;
        let slow = FlowConfig::new(Flow::Dnls, dt * lambda * lambda, cfg.t * lambda * lambda).with_stride(cfg.steps);
        let base_t = evolve(&q0, &slow)?;
        let rhs = dilate(base_t.last(), lambda, centre)?;
        let f_err = lhs.last().l2_distance(&rhs);

        worst_m = worst_m.max(m_err);
        worst_d = worst_d.max(d_err);
        worst_f = worst_f.max(f_err);
        table.push_numbers(&[lambda, m_err, d_err, f_err]);
    }
    report.check("mass_invariance", Check::at_most(worst_m, cfg.mass_tol));
    report.check("determinant_covariance", Check::at_most(worst_d, cfg.det_tol));
    report.check("flow_covariance", Check::at_most(worst_f, cfg.flow_tol));
    report.table("scaling.csv", table);
    Ok(report.conclude())
}
