use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{algebraic_soliton, RESOLVED_START};
use crate::lax::closed::torus_factor;
use crate::lax::{build_lambda, KappaSet, WindowPolicy};
use crate::spectral::{FieldState, Grid};

/// Members are rescaled so the heaviest sits this far (relative) below the cap.
pub const CAP_MARGIN: f64 = 1e-9;

/// Window multiple used when certifying √κ‖Λ‖_op; the operator norm is
/// carried by |ξ| ≲ κ, so this is far from the determinant windows.
pub const GUARD_WINDOW_FACTOR: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// Periodized Gaussians with random width, centre, drift and mass.
    Gaussian,
    /// Gaussian envelope times a low carrier cos(k₀x + φ).
    Modulated,
    /// Periodic algebraic solitons of dyadically shrinking width.
    SolitonRescale,
    /// Normal coefficients on |m| ≤ modes/16.
    RandomBand,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 4] = [Self::Gaussian, Self::Modulated, Self::SolitonRescale, Self::RandomBand];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Modulated => "modulated",
            Self::SolitonRescale => "soliton-rescale",
            Self::RandomBand => "random-band",
        }
    }
}

/// Everything needed to rebuild an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub count: usize,
    pub seed: u64,
    pub mass_cap: f64,
    pub modes: usize,
    pub period: f64,
}

impl EnsembleSpec {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.modes, self.period)
    }

    pub fn build(&self) -> Result<Ensemble> {
        build_ensemble(self.kind, self.count, self.seed, self.mass_cap, self.grid()?)
    }
}

/// (ε, κ₀, 𝒦): the mass margin below 4π, the smallest ladder κ at which
/// every member meets the guard, and the ladder from κ₀ up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub epsilon: f64,
    pub kappa0: f64,
    pub kappas: KappaSet,
    /// max over members of √κ₀‖Λ‖_op.
    pub guard: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub members: Vec<FieldState>,
    pub mass_cap: f64,
    pub certificate: Option<Certificate>,
}

impl Ensemble {
    /// `count` zero fields, the trivial ensemble.
    pub fn zeros(grid: Grid, count: usize, mass_cap: f64) -> Self {
        Self {
            members: vec![FieldState::zeros(grid); count],
            mass_cap,
            certificate: None,
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.members.first().map(|q| q.grid())
    }

    pub fn sup_mass(&self) -> f64 {
        self.members.iter().map(|q| q.mass()).fold(0.0, f64::max)
    }
}

/// Periodized Gaussian of width σ centred at `centre`, spectrally shifted by
/// `drift`: q̂(ξ) ∝ e^{−((ξ − drift)σ)²/2} e^{−iξ·centre}, scaled to `mass`.
pub fn periodized_gaussian(grid: Grid, sigma: f64, mass: f64, centre: f64, drift: f64) -> Result<FieldState> {
    if !(sigma > 0.0 && mass >= 0.0) {
        return Err(Error::Parameter(format!("gaussian needs sigma > 0 and mass >= 0, got {sigma}, {mass}")));
    }
    let c = (0..grid.modes())
        .map(|i| {
            let xi = grid.frequency(i);
            let s = (xi - drift) * sigma;
            Complex64::from_polar((-0.5 * s * s).exp(), -xi * centre)
        })
        .collect();
    with_mass(FieldState::from_coefficients(grid, c)?, mass)
}

fn with_mass(q: FieldState, mass: f64) -> Result<FieldState> {
    let m = q.mass();
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Ensemble("member has no mass to rescale".into()));
    }
    Ok(q.scaled(Complex64::new((mass / m).sqrt(), 0.0)))
}

fn member_masses(rng: &mut ChaCha8Rng, count: usize, cap: f64) -> Vec<f64> {
    let top = cap * (1.0 - CAP_MARGIN);
    (0..count)
        .map(|i| if i == 0 { top } else { top * (1.0 - 0.5 * rng.random::<f64>()) })
        .collect()
}

/// Width index j for a soliton about λ times narrower than branch 0.
fn rescale_branch(lambda: u32) -> u32 {
    // coth β ≈ 1/β for narrow solitons, and coth β = 3 + 2j
    ((3.0 * lambda as f64 - 3.0) / 2.0).round() as u32
}

/// Deterministic ensemble of `count` members on `grid`.
///
/// Soliton members all carry M = 4π, so that kind needs `mass_cap` above 4π.
/// Every member must be spectrally resolved on the grid.
pub fn build_ensemble(kind: EnsembleKind, count: usize, seed: u64, mass_cap: f64, grid: Grid) -> Result<Ensemble> {
    if !(mass_cap > 0.0 && mass_cap.is_finite()) {
        return Err(Error::Parameter(format!("mass_cap must be positive, got {mass_cap}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = grid.period();
    let dxi = grid.dxi();
    let masses = member_masses(&mut rng, count, mass_cap);
    let mut members = Vec::with_capacity(count);
    for (i, &mass) in masses.iter().enumerate() {
        let q = match kind {
            EnsembleKind::Gaussian => {
                let sigma = l * (0.075 + 0.05 * rng.random::<f64>());
                let centre = l * rng.random::<f64>();
                let drift = 2.0 * dxi * (2.0 * rng.random::<f64>() - 1.0);
                periodized_gaussian(grid, sigma, mass, centre, drift)?
            }
            EnsembleKind::Modulated => {
                let sigma = l * (0.1 + 0.05 * rng.random::<f64>());
                let centre = l * rng.random::<f64>();
                let carrier = dxi * rng.random_range(2..=4) as f64;
                let phase = 2.0 * PI * rng.random::<f64>();
                let env = periodized_gaussian(grid, sigma, 1.0, centre, 0.0)?;
                let samples = env
                    .samples()
                    .iter()
                    .zip(grid.points())
                    .map(|(z, x)| z * (carrier * x + phase).cos())
                    .collect();
                with_mass(FieldState::from_samples(grid, samples)?, mass)?
            }
            EnsembleKind::SolitonRescale => {
                if mass_cap <= 4.0 * PI {
                    return Err(Error::Ensemble(format!(
                        "soliton members carry M = 4pi, above the cap {mass_cap}"
                    )));
                }
                algebraic_soliton(grid, rescale_branch(1 << i))?
            }
            EnsembleKind::RandomBand => {
                let band = (grid.modes() / 16).max(1) as i64;
                let mut c = vec![Complex64::new(0.0, 0.0); grid.modes()];
                for m in -band..=band {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    c[grid.index(m).expect("band inside grid")] = Complex64::new(re, im);
                }
                with_mass(FieldState::from_coefficients(grid, c)?, mass)?
            }
        };
        let frac = q.top_octave_fraction();
        if frac > RESOLVED_START {
            return Err(Error::Ensemble(format!(
                "member {i} is not resolved on {} modes (top-octave fraction {frac:e})",
                grid.modes()
            )));
        }
        members.push(q);
    }
    Ok(Ensemble {
        members,
        mass_cap,
        certificate: None,
    })
}

/// √κ‖Λ(q)‖_op on a window of GUARD_WINDOW_FACTOR·κ.
pub fn guard_value(q: &FieldState, kappa: f64) -> Result<f64> {
    if q.is_zero() {
        return Ok(0.0);
    }
    let window = WindowPolicy::with_kappa_factor(GUARD_WINDOW_FACTOR).window(q, kappa)?.dense_clipped();
    Ok(kappa.sqrt() * build_lambda(q, kappa, &window)?.op_norm())
}

/// Certificate for `states` over `ladder`, or `None` when no ladder κ meets
/// the guard for all of them.
pub fn certify(states: &[FieldState], ladder: &KappaSet) -> Result<Option<Certificate>> {
    for kappa0 in ladder.iter() {
        let mut worst = 0.0f64;
        for q in states {
            worst = worst.max(guard_value(q, kappa0)?);
            if worst >= crate::lax::series::GUARD {
                break;
            }
        }
        if worst < crate::lax::series::GUARD {
            let kappas = ladder.at_least(kappa0);
            let heaviest = states
                .iter()
                .map(|q| kappas.iter().map(|k| torus_factor(k, q.grid().period())).fold(0.0, f64::max) * q.mass())
                .fold(0.0, f64::max);
            return Ok(Some(Certificate {
                epsilon: 0.5 * (4.0 * PI - heaviest),
                kappa0,
                kappas,
                guard: worst,
            }));
        }
    }
    Ok(None)
}
