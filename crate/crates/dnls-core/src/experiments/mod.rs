//! Experiment drivers. Each returns an [`ExperimentReport`] whose verdict is
//! decided by frozen thresholds from [`constants`].

pub mod coercivity;
pub mod constants;
pub mod ensemble;
pub mod equicontinuity;
pub mod hs_growth;
pub mod inequalities;
pub mod report;
pub mod scaling;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use coercivity::h1_coercivity_check;
pub use ensemble::{build_ensemble, certify, periodized_gaussian, Certificate, Ensemble, EnsembleKind, EnsembleSpec};
pub use equicontinuity::{equicontinuity_report, EquicontinuityConfig};
pub use hs_growth::{hs_growth_report, HsGrowthConfig};
pub use inequalities::{inequality_suite, InequalityConfig};
pub use report::{Check, ExperimentReport, Verdict};
pub use scaling::{scaling_covariance, ScalingConfig};

use crate::error::{Error, Result};

pub const EXPERIMENTS: [&str; 5] = [
    "equicontinuity",
    "hs_growth",
    "h1_coercivity",
    "inequality_suite",
    "scaling_covariance",
];

/// An ensemble together with the driver settings run on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleRun<C> {
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub config: C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteRun {
    pub seed: u64,
    #[serde(default)]
    pub config: InequalityConfig,
}

fn gaussian_spec(count: usize, modes: usize, period: f64) -> EnsembleSpec {
    EnsembleSpec {
        kind: EnsembleKind::Gaussian,
        count,
        seed: 7,
        mass_cap: 0.8 * 4.0 * std::f64::consts::PI,
        modes,
        period,
    }
}

fn unknown(name: &str) -> Error {
    Error::UnknownExperiment {
        name: name.to_string(),
        available: EXPERIMENTS.iter().map(|s| s.to_string()).collect(),
    }
}

/// Default run configuration of `name`, as JSON.
pub fn default_config(name: &str) -> Result<serde_json::Value> {
    let v = match name {
        "equicontinuity" => serde_json::to_value(EnsembleRun {
            ensemble: gaussian_spec(16, 256, 8.0),
            config: EquicontinuityConfig::default(),
        })?,
        "hs_growth" => serde_json::to_value(EnsembleRun {
            ensemble: gaussian_spec(8, 256, 8.0),
            config: HsGrowthConfig::default(),
        })?,
        "h1_coercivity" => serde_json::to_value(EnsembleRun {
            ensemble: gaussian_spec(32, 256, 8.0),
            config: serde_json::Value::Null,
        })?,
        "inequality_suite" => serde_json::to_value(SuiteRun {
            seed: 7,
            config: InequalityConfig::default(),
        })?,
        "scaling_covariance" => serde_json::to_value(ScalingConfig::default())?,
        _ => return Err(unknown(name)),
    };
    Ok(v)
}

fn parse<T: DeserializeOwned>(v: serde_json::Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::RejectedInput(format!("config: {e}")))
}

/// Run `name` with `config` (defaults when `None`); `seed` overrides the
/// ensemble or suite seed.
pub fn run_named(name: &str, config: Option<serde_json::Value>, seed: Option<u64>) -> Result<ExperimentReport> {
    let v = match config {
        Some(v) => v,
        None => default_config(name)?,
    };
    match name {
        "equicontinuity" => {
            let mut run: EnsembleRun<EquicontinuityConfig> = parse(v)?;
            run.ensemble.seed = seed.unwrap_or(run.ensemble.seed);
            equicontinuity_report(&run.ensemble.build()?, &run.config)
        }
        "hs_growth" => {
            let mut run: EnsembleRun<HsGrowthConfig> = parse(v)?;
            run.ensemble.seed = seed.unwrap_or(run.ensemble.seed);
            hs_growth_report(&run.ensemble.build()?, &run.config)
        }
        "h1_coercivity" => {
            let mut run: EnsembleRun<Option<()>> = parse(v)?;
            run.ensemble.seed = seed.unwrap_or(run.ensemble.seed);
            h1_coercivity_check(&run.ensemble.build()?)
        }
        "inequality_suite" => {
            let run: SuiteRun = parse(v)?;
            inequality_suite(seed.unwrap_or(run.seed), &run.config)
        }
        "scaling_covariance" => scaling_covariance(&parse(v)?),
        _ => Err(unknown(name)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        for name in EXPERIMENTS {
            let v = default_config(name).unwrap();
            assert!(v.is_object(), "{name}");
        }
        assert!(matches!(default_config("nope"), Err(Error::UnknownExperiment { .. })));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut v = default_config("scaling_covariance").unwrap();
        v["bogus"] = serde_json::json!(1);
        assert!(matches!(run_named("scaling_covariance", Some(v), None), Err(Error::RejectedInput(_))));
    }
}
