use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on [0, L) with `modes` points.
///
/// Frequencies live on the lattice (2π/L)ℤ and are stored in FFT order:
/// index `i < modes/2` carries wavenumber `i`, the rest carry `i - modes`.
/// The Nyquist slot therefore holds wavenumber `-modes/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    modes: usize,
    period: f64,
}

impl Grid {
    pub fn new(modes: usize, period: f64) -> Result<Self> {
        if modes < 4 || !modes.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "modes must be a power of two >= 4, got {modes}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        Ok(Self { modes, period })
    }

    /// Unit torus with `modes` points.
    pub fn unit(modes: usize) -> Result<Self> {
        Self::new(modes, 1.0)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Physical spacing L/N.
    pub fn dx(&self) -> f64 {
        self.period / self.modes as f64
    }

    /// Lattice spacing 2π/L of the frequency set.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn point(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.modes).map(|j| self.point(j)).collect()
    }

    pub fn wavenumber(&self, index: usize) -> i64 {
        let n = self.modes as i64;
        let i = index as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn frequency(&self, index: usize) -> f64 {
        self.wavenumber(index) as f64 * self.dxi()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.modes).map(|i| self.frequency(i)).collect()
    }

    /// Storage slot of wavenumber `m`, if representable.
    pub fn index(&self, m: i64) -> Option<usize> {
        let n = self.modes as i64;
        if m < -n / 2 || m >= n / 2 {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + n) as usize)
        }
    }

    /// Largest |ξ| on the grid (the Nyquist frequency).
    pub fn max_frequency(&self) -> f64 {
        (self.modes / 2) as f64 * self.dxi()
    }

    /// Largest wavenumber kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        self.modes as i64 / 3
    }

    pub fn is_retained(&self, index: usize) -> bool {
        self.wavenumber(index).abs() <= self.dealias_cutoff()
    }

    /// Largest retained |ξ| under the 2/3 rule.
    pub fn retained_max_frequency(&self) -> f64 {
        self.dealias_cutoff() as f64 * self.dxi()
    }
}
