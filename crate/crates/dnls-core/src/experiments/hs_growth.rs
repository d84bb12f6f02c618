use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constants::{HS_ALMOST_MAX, HS_BOUND_MAX};
use super::ensemble::{certify, Ensemble};
use super::report::{Check, ExperimentReport, Verdict};
use crate::error::{Error, Result};
use crate::flows::{evolve, Flow, FlowConfig};
use crate::io::{render_dat, CsvTable};
use crate::lax::{beta_s_weight, KappaSet};
use crate::spectral::{sobolev_norm, FieldState, Grid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsGrowthConfig {
    pub s: f64,
    pub t_final: f64,
    pub dt: f64,
    pub monitor_stride: usize,
    /// κ ladder for β_s^[2]; the affine bound is tested from κ₀ up.
    pub ladder: KappaSet,
}

impl Default for HsGrowthConfig {
    fn default() -> Self {
        Self {
            s: 1.0 / 6.0,
            t_final: 0.25,
            dt: 2.5e-4,
            monitor_stride: 100,
            ladder: KappaSet::dyadic(0, 8),
        }
    }
}

/// w_s(ξ_i, κ) for every grid frequency and ladder κ; rows follow the ladder.
fn weight_table(grid: &Grid, ladder: &KappaSet, s: f64) -> Result<Vec<Vec<f64>>> {
    ladder
        .iter()
        .map(|k| (0..grid.modes()).map(|i| beta_s_weight(grid.frequency(i), k, s)).collect())
        .collect()
}

fn beta_s_row(q: &FieldState, weights: &[Vec<f64>]) -> Vec<f64> {
    let l = q.grid().period();
    weights
        .iter()
        .map(|w| l * q.coefficients().iter().zip(w).map(|(c, w)| w * c.norm_sqr()).sum::<f64>())
        .collect()
}

/// Number of adjacent ladder pairs where β_s^[2] increases (beyond roundoff).
fn monotone_violations(row: &[f64]) -> usize {
    row.windows(2).filter(|p| p[1] > p[0] * (1.0 + 1e-12) + 1e-300).count()
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// H^s growth along DNLS orbits against the affine bound
/// sup_t β_s^[2](κ) ≲ sup_0 β_s^[2](κ) + κ^{2s} sup M².
pub fn hs_growth_report(ensemble: &Ensemble, cfg: &HsGrowthConfig) -> Result<ExperimentReport> {
    if !(cfg.s > 0.0 && cfg.s < 0.5) {
        return Err(Error::Parameter(format!("s must lie in (0, 1/2), got {}", cfg.s)));
    }
    let mut report = ExperimentReport::new("hs_growth", serde_json::to_value(cfg)?);
    let Some(grid) = ensemble.grid().copied() else {
        return Ok(report.conclude());
    };
    let Some(cert) = certify(&ensemble.members, &cfg.ladder)? else {
        report.mark(Verdict::Inconclusive, "guard unattainable on the kappa ladder for the initial ensemble");
        return Ok(report);
    };
    report.record("kappa0", cert.kappa0);
    let weights = weight_table(&grid, &cfg.ladder, cfg.s)?;
    let fc = FlowConfig::new(Flow::Dnls, cfg.dt, cfg.t_final).with_stride(cfg.monitor_stride);
    let runs = ensemble
        .members
        .par_iter()
        .map(|q| {
            let traj = evolve(q, &fc)?;
            let hs: Vec<f64> = traj.states.iter().map(|q| sobolev_norm(q, cfg.s)).collect();
            let beta: Vec<Vec<f64>> = traj.states.iter().map(|q| beta_s_row(q, &weights)).collect();
            Ok((traj.times, hs, beta))
        })
        .collect::<Result<Vec<_>>>()?;

    let sup_m = ensemble.sup_mass();
    let hs0 = runs.iter().map(|r| r.1[0]).fold(0.0, f64::max);
    let hs_t = runs.iter().flat_map(|r| r.1.iter().copied()).fold(0.0, f64::max);
    report.record("hs_sup0", hs0);
    report.record("hs_supt", hs_t);
    report.check("hs_bound", Check::at_most(ratio(hs_t, hs0), HS_BOUND_MAX));

    let mut decay = Vec::new();
    let mut worst = 0.0f64;
    for (j, k) in cfg.ladder.iter().enumerate() {
        let b0 = runs.iter().map(|r| r.2[0][j]).fold(0.0, f64::max);
        let bt = runs.iter().flat_map(|r| r.2.iter().map(move |row| row[j])).fold(0.0, f64::max);
        let affine = b0 + k.powf(2.0 * cfg.s) * sup_m * sup_m;
        if k >= cert.kappa0 {
            worst = worst.max(ratio(bt, affine));
        }
        decay.push(vec![k, b0, bt, affine]);
    }
    report.check("almost", Check::at_most(worst, HS_ALMOST_MAX));
    let violations: usize = runs.iter().flat_map(|r| r.2.iter().map(|row| monotone_violations(row))).sum();
    report.check("ladder_monotone", Check::at_most(violations as f64, 0.0));

    let mut header = vec!["member".to_string(), "t".into(), "hs_norm".into()];
    header.extend(cfg.ladder.iter().map(|k| format!("beta_s2_{k}")));
    let mut table = CsvTable::new(&header);
    for (i, (times, hs, beta)) in runs.iter().enumerate() {
        for (n, t) in times.iter().enumerate() {
            let mut row = vec![i as f64, *t, hs[n]];
            row.extend(&beta[n]);
            table.push_numbers(&row);
        }
    }
    report.table("hs_growth.csv", table);
    report.curve("kappa_decay.dat", render_dat(&["kappa", "beta_s2_sup0", "beta_s2_supt", "affine_bound"], &decay));
    Ok(report.conclude())
}
