//! Run configurations. Every document is strict JSON: unknown keys are
//! rejected and nothing is defaulted except what `--print-defaults` shows.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use dnls_core::experiments::periodized_gaussian;
use dnls_core::flows::{algebraic_soliton, Flow, FlowConfig};
use dnls_core::lax::DeterminantOptions;
use dnls_core::spectral::snapshot::read_snapshot;
use dnls_core::{Error, FieldState, Grid, KappaSet, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub modes: usize,
    pub period: f64,
}

/// Initial datum of a simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    Zero,
    Gaussian {
        sigma: f64,
        mass: f64,
        centre: f64,
        drift: f64,
    },
    Soliton {
        branch: u32,
    },
    /// Uniform random coefficients on |m| ≤ band with e^{-decay|m|} envelope.
    RandomBand {
        band: i64,
        decay: f64,
        mass: f64,
        seed: u64,
    },
    Snapshot {
        path: PathBuf,
    },
}

impl InitialSpec {
    pub fn build(&self, grid: Grid) -> Result<FieldState> {
        match self {
            Self::Zero => Ok(FieldState::zeros(grid)),
            Self::Gaussian {
                sigma,
                mass,
                centre,
                drift,
            } => periodized_gaussian(grid, *sigma, *mass, *centre, *drift),
            Self::Soliton { branch } => algebraic_soliton(grid, *branch),
            Self::RandomBand { band, decay, mass, seed } => random_band(grid, *band, *decay, *mass, *seed),
            Self::Snapshot { path } => {
                let q = read_snapshot(path)?;
                if q.grid() != &grid {
                    return Err(Error::RejectedInput(format!(
                        "snapshot grid {:?} does not match the configured grid",
                        q.grid()
                    )));
                }
                Ok(q)
            }
        }
    }
}

fn random_band(grid: Grid, band: i64, decay: f64, mass: f64, seed: u64) -> Result<FieldState> {
    if band < 0 || band > grid.dealias_cutoff() || !(decay >= 0.0) || !(mass >= 0.0) {
        return Err(Error::Parameter(format!(
            "random-band needs 0 <= band <= {}, decay >= 0, mass >= 0",
            grid.dealias_cutoff()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![Complex64::new(0.0, 0.0); grid.modes()];
    for m in -band..=band {
        let env = (-decay * m.abs() as f64).exp();
        let z = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * env;
        c[grid.index(m).expect("band is inside the grid")] = z;
    }
    let q = FieldState::from_coefficients(grid, c)?;
    if mass == 0.0 {
        return Ok(FieldState::zeros(grid));
    }
    Ok(q.scaled(Complex64::new((mass / q.mass()).sqrt(), 0.0)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub grid: GridSpec,
    pub initial: InitialSpec,
    pub flow: FlowConfig,
}

impl SimulateConfig {
    pub fn example() -> Self {
        Self {
            grid: GridSpec { modes: 128, period: 8.0 },
            initial: InitialSpec::Gaussian {
                sigma: 0.5,
                mass: 1.0,
                centre: 4.0,
                drift: 0.0,
            },
            flow: FlowConfig::new(Flow::Dnls, 1e-3, 0.1)
                .with_stride(20)
                .with_probes(KappaSet::new(vec![4.0, 8.0, 16.0]).expect("dyadic")),
        }
    }

    /// Everything that can be checked without integrating.
    pub fn prepare(&mut self, seed: Option<u64>) -> Result<FieldState> {
        if let (Some(s), InitialSpec::RandomBand { seed, .. }) = (seed, &mut self.initial) {
            *seed = s;
        }
        let grid = Grid::new(self.grid.modes, self.grid.period)?;
        self.flow.validate()?;
        let q0 = self.initial.build(grid)?;
        self.flow.check_step(&q0)?;
        Ok(q0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub snapshot: PathBuf,
    pub kappas: KappaSet,
    pub determinant: DeterminantOptions,
}

impl ScanConfig {
    pub fn example() -> Self {
        Self {
            snapshot: PathBuf::from("snap_000000.bin"),
            kappas: KappaSet::dyadic(0, 8),
            determinant: DeterminantOptions::default(),
        }
    }
}

pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::RejectedInput(format!("{}: {e}", path.display())))
}

pub fn parse<T: for<'de> Deserialize<'de>>(v: serde_json::Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::RejectedInput(format!("config: {e}")))
}
