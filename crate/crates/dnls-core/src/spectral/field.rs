use num_complex::Complex64;

use super::grid::Grid;
use super::transform;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex field on a periodic grid, held in both representations.
///
/// `coefficients` are Fourier-series coefficients, q(x) = Σ c_k e^{iξ_k x},
/// so Plancherel reads ∫|q|² = L Σ|c_k|². On the unit torus these are the
/// usual q̂(ξ).
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    grid: Grid,
    coeffs: Vec<Complex64>,
    samples: Vec<Complex64>,
}

/// Sample `sampler` on the grid points.
pub fn make_field<F>(grid: Grid, sampler: F) -> Result<FieldState>
where
    F: Fn(f64) -> Complex64,
{
    let samples: Vec<Complex64> = (0..grid.modes()).map(|j| sampler(grid.point(j))).collect();
    FieldState::from_samples(grid, samples)
}

impl FieldState {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; grid.modes()],
            samples: vec![ZERO; grid.modes()],
        }
    }

    pub fn from_samples(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.modes() {
            return Err(Error::RejectedInput(format!(
                "expected {} samples, got {}",
                grid.modes(),
                samples.len()
            )));
        }
        if let Some(j) = samples.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::RejectedInput(format!(
                "non-finite sample at x = {}",
                grid.point(j)
            )));
        }
        let coeffs = transform::forward(&samples);
        Ok(Self {
            grid,
            coeffs,
            samples,
        })
    }

    pub fn from_coefficients(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.modes() {
            return Err(Error::RejectedInput(format!(
                "expected {} coefficients, got {}",
                grid.modes(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::RejectedInput("non-finite coefficient".into()));
        }
        let samples = transform::inverse(&coeffs);
        Ok(Self {
            grid,
            coeffs,
            samples,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at wavenumber m; zero off the grid.
    pub fn coefficient(&self, m: i64) -> Complex64 {
        self.grid.index(m).map_or(ZERO, |i| self.coeffs[i])
    }

    /// Coefficient of q̄ at wavenumber m, i.e. conj(c(-m)).
    pub fn conj_coefficient(&self, m: i64) -> Complex64 {
        self.coefficient(-m).conj()
    }

    /// M(q) = ∫|q|² dx.
    pub fn mass(&self) -> f64 {
        self.grid.period() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    /// Quadrature of ∫|q|² on the physical side.
    pub fn physical_mass(&self) -> f64 {
        self.grid.dx() * self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// The field q̄.
    pub fn conj(&self) -> Self {
        let samples: Vec<Complex64> = self.samples.iter().map(|z| z.conj()).collect();
        let coeffs = (0..self.grid.modes())
            .map(|i| self.conj_coefficient(self.grid.wavenumber(i)))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
            samples,
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            samples: self.samples.iter().map(|c| c * s).collect(),
        }
    }

    /// a·self + b·other on a shared grid.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::RejectedInput("grids differ".into()));
        }
        Ok(Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// Largest |ξ| whose coefficient exceeds `rel` times the largest one.
    pub fn max_occupied_frequency(&self, rel: f64) -> f64 {
        let peak = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        (0..self.grid.modes())
            .filter(|&i| self.coeffs[i].norm() > rel * peak)
            .map(|i| self.grid.frequency(i).abs())
            .fold(0.0, f64::max)
    }

    /// Largest |m| with a non-zero coefficient.
    pub fn support_width(&self) -> usize {
        (0..self.grid.modes())
            .filter(|&i| self.coeffs[i] != ZERO)
            .map(|i| self.grid.wavenumber(i).unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Zero every coefficient outside the 2/3-rule band.
    pub fn dealiased(&self) -> Self {
        let coeffs = (0..self.grid.modes())
            .map(|i| if self.grid.is_retained(i) { self.coeffs[i] } else { ZERO })
            .collect();
        Self::from_coefficients(self.grid, coeffs).expect("finite by construction")
    }

    /// Fraction of L² mass in the top octave of the retained band.
    pub fn top_octave_fraction(&self) -> f64 {
        let cut = self.grid.dealias_cutoff();
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let top: f64 = (0..self.grid.modes())
            .filter(|&i| 2 * self.grid.wavenumber(i).abs() > cut)
            .map(|i| self.coeffs[i].norm_sqr())
            .sum();
        top / total
    }

    /// L² distance to another field on the same grid.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (self.grid.period() * s).sqrt()
    }

    /// ∫ f g dx (bilinear, no conjugation), exact for band-limited products
    /// whose combined band fits the grid.
    pub fn bilinear(&self, other: &Self) -> Complex64 {
        let n = self.grid.modes();
        let mut s = ZERO;
        for i in 0..n {
            let m = self.grid.wavenumber(i);
            s += self.coeffs[i] * other.coefficient(-m);
        }
        s * self.grid.period()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_sampler_gives_zero_coefficients() {
        let f = make_field(Grid::unit(32).unwrap(), |_| c(0.0, 0.0)).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn pure_mode_is_exact() {
        let f = make_field(Grid::unit(64).unwrap(), |x| Complex64::from_polar(1.0, 2.0 * PI * x))
            .unwrap();
        for m in -32..32i64 {
            let want = if m == 1 { 1.0 } else { 0.0 };
            assert!((f.coefficient(m) - want).norm() < 1e-13, "m = {m}");
        }
    }

    #[test]
    fn rejects_non_finite_sample() {
        let r = make_field(Grid::unit(16).unwrap(), |x| {
            if x > 0.5 {
                c(f64::NAN, 0.0)
            } else {
                c(1.0, 0.0)
            }
        });
        assert!(matches!(r, Err(Error::RejectedInput(_))));
    }

    #[test]
    fn gaussian_matches_naive_dft() {
        let g = Grid::new(128, 3.0).unwrap();
        let f = make_field(g, |x| c((-(x - 1.5) * (x - 1.5) * 4.0).exp(), 0.3 * x.sin())).unwrap();
        let n = g.modes();
        for i in 0..n {
            let xi = g.frequency(i);
            let mut s = c(0.0, 0.0);
            for j in 0..n {
                s += f.samples()[j] * Complex64::from_polar(1.0, -xi * g.point(j));
            }
            s /= n as f64;
            assert!((s - f.coefficients()[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn conj_coefficients() {
        let g = Grid::unit(32).unwrap();
        let f = make_field(g, |x| c((2.0 * PI * x).cos(), (4.0 * PI * x).sin() + 0.2)).unwrap();
        let fb = f.conj();
        for m in -15..15i64 {
            assert!((fb.coefficient(m) - f.conj_coefficient(m)).norm() < 1e-14);
        }
        let back = FieldState::from_samples(g, fb.samples().to_vec()).unwrap();
        for m in -15..15i64 {
            assert!((back.coefficient(m) - fb.coefficient(m)).norm() < 1e-14);
        }
    }
}
