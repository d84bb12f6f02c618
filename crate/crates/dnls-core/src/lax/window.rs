use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{FieldState, Grid};

/// Symmetric frequency window {kΔ : |k| ≤ K} on the lattice of a grid.
///
/// The window may reach past the grid's Nyquist frequency: the operators act
/// on all of L²(𝕋) and coefficients off the grid are zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    half_width: usize,
    spacing: f64,
}

impl Window {
    /// Cap on K for band-stored sections.
    pub const MAX_HALF_WIDTH: usize = 1 << 16;
    /// Cap on K for dense sections (a few hundred MB per matrix).
    pub const DENSE_MAX_HALF_WIDTH: usize = 2048;

    pub fn new(grid: &Grid, half_width: usize) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::Window("half-width must be positive".into()));
        }
        if half_width > Self::MAX_HALF_WIDTH {
            return Err(Error::Window(format!(
                "half-width {half_width} exceeds the cap {}",
                Self::MAX_HALF_WIDTH
            )));
        }
        Ok(Self {
            half_width,
            spacing: grid.dxi(),
        })
    }

    /// Smallest window containing |ξ| ≤ cutoff.
    pub fn from_cutoff(grid: &Grid, cutoff: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::Window(format!("bad cutoff {cutoff}")));
        }
        let k = (cutoff / grid.dxi() * (1.0 - 1e-12)).ceil().max(1.0);
        if k > Self::MAX_HALF_WIDTH as f64 {
            return Err(Error::Window(format!(
                "cutoff {cutoff} needs half-width {k}, above the cap {}",
                Self::MAX_HALF_WIDTH
            )));
        }
        Self::new(grid, k as usize)
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn len(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn cutoff(&self) -> f64 {
        self.half_width as f64 * self.spacing
    }

    /// Lattice index of row/column `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        i as i64 - self.half_width as i64
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.wavenumber(i) as f64 * self.spacing
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.frequency(i)).collect()
    }

    pub fn scaled(&self, factor: usize) -> Result<Self> {
        let k = self.half_width * factor;
        if k > Self::MAX_HALF_WIDTH {
            return Err(Error::Window(format!("half-width {k} exceeds the cap")));
        }
        Ok(Self {
            half_width: k,
            spacing: self.spacing,
        })
    }

    /// The same window clipped to the dense cap.
    pub fn dense_clipped(&self) -> Self {
        Self {
            half_width: self.half_width.min(Self::DENSE_MAX_HALF_WIDTH),
            spacing: self.spacing,
        }
    }

    pub fn halved(&self) -> Self {
        Self {
            half_width: (self.half_width / 2).max(1),
            spacing: self.spacing,
        }
    }
}

/// Rule choosing Ξ = max(kappa_factor·κ, support_factor·ξ_occ, min).
///
/// Sections are tail-completed (see [`crate::lax::determinant`]), so the
/// κ multiple can be far smaller than what a bare section would need.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowPolicy {
    pub kappa_factor: f64,
    pub support_factor: f64,
    /// Coefficients below this fraction of the peak count as unoccupied.
    pub occupancy: f64,
    pub min_half_width: usize,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self {
            kappa_factor: 64.0,
            support_factor: 4.0,
            occupancy: 1e-13,
            min_half_width: 8,
        }
    }
}

impl WindowPolicy {
    pub fn with_kappa_factor(kappa_factor: f64) -> Self {
        Self {
            kappa_factor,
            ..Self::default()
        }
    }

    pub fn cutoff(&self, q: &FieldState, kappa: f64) -> f64 {
        let occ = q.max_occupied_frequency(self.occupancy);
        let floor = self.min_half_width as f64 * q.grid().dxi();
        (self.kappa_factor * kappa).max(self.support_factor * occ).max(floor)
    }

    pub fn window(&self, q: &FieldState, kappa: f64) -> Result<Window> {
        Window::from_cutoff(q.grid(), self.cutoff(q, kappa))
    }
}
