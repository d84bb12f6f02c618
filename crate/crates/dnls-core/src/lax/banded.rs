//! Band-storage route to det(1 − iκΛΓ) for fields of narrow spectral support.
//!
//! A = iκΛΓ has bandwidth 2w when q̂ lives in |m| ≤ w, so its entries, traces
//! and an LU factorisation with partial pivoting cost O(n w²) instead of
//! O(n³). Used by [`super::perturbation_determinant`].

use num_complex::Complex64;

use super::kernel::{half_resolvents, kernel_width, validate, NEGLIGIBLE};
use super::window::Window;
use crate::error::Result;
use crate::spectral::FieldState;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square matrix with kl sub- and ku super-diagonals, stored column-wise with
/// kl extra rows on top for pivoting fill-in (LAPACK `gb` layout).
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ld,
            data: vec![ZERO; ld * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        j * self.ld + (self.kl + self.ku + i - j)
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i + self.ku >= j && j + self.kl >= i
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            ZERO
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.data[s] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// tr(M²) = Σ M(i,j) M(j,i).
    pub fn trace_square(&self) -> Complex64 {
        let mut s = ZERO;
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku.min(self.kl));
            let hi = (j + self.kl.min(self.ku)).min(self.n - 1);
            for i in lo..=hi {
                s += self.get(i, j) * self.get(j, i);
            }
        }
        s
    }

    /// Determinant by unblocked banded LU with partial pivoting (consumes
    /// the storage). Column segments are contiguous, so the updates are
    /// plain axpy loops.
    pub fn determinant(mut self) -> Complex64 {
        let (n, kl, ku, ld) = (self.n, self.kl, self.ku, self.ld);
        let kv = kl + ku;
        let mut det = ONE;
        // rightmost column touched so far by row interchanges
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ld + kv;
            let mut p = 0;
            let mut best = -1.0;
            for i in 0..=km {
                let v = self.data[col + i].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return ZERO;
            }
            ju = ju.max((j + ku + p).min(n - 1));
            if p != 0 {
                det = -det;
                for c in j..=ju {
                    let a = self.slot(j, c);
                    self.data.swap(a, a + p);
                }
            }
            let pivot = self.data[col];
            det *= pivot;
            let inv = pivot.inv();
            for z in &mut self.data[col + 1..=col + km] {
                *z *= inv;
            }
            for c in j + 1..=ju {
                let top_at = self.slot(j, c);
                let top = self.data[top_at];
                if top == ZERO {
                    continue;
                }
                let (head, tail) = self.data.split_at_mut(top_at + 1);
                let l = &head[col + 1..=col + km];
                for (t, &m) in tail[..km].iter_mut().zip(l) {
                    *t -= m * top;
                }
            }
        }
        det
    }
}

/// A = iκΛΓ on a window, in band storage.
#[derive(Clone, Debug)]
pub struct BandedSection {
    pub kappa: f64,
    pub window: Window,
    pub a: BandMatrix,
}

impl BandedSection {
    pub fn new(q: &FieldState, kappa: f64, window: &Window) -> Result<Self> {
        validate(q, kappa, window)?;
        let n = window.len();
        let w = kernel_width(q, window);
        let peak = q.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let coeff = |m: i64| {
            if m.unsigned_abs() as usize > w {
                return ZERO;
            }
            let c = q.coefficient(m);
            if c.norm() > NEGLIGIBLE * peak {
                c
            } else {
                ZERO
            }
        };
        let (dm, dp) = half_resolvents(kappa, window);
        let band = (2 * w).min(n.saturating_sub(1));
        let mut a = BandMatrix::zeros(n, band, band);
        // c[m + w] = q̂(m) for |m| ≤ w
        let c: Vec<Complex64> = (-(w as i64)..=w as i64).map(coeff).collect();
        let dp2: Vec<Complex64> = dp.iter().map(|z| z * z).collect();
        let wi = w as i64;
        // column j of ΛΓ: Σ_l Λ(·,l) dp_l conj(q̂(k_j − k_l)) dm_j, accumulated
        // as contiguous axpy runs over the rows of Λ(·,l)
        for j in 0..n {
            let base = a.slot(j.saturating_sub(band), j);
            let row0 = j.saturating_sub(band);
            for l in j.saturating_sub(w)..=(j + w).min(n - 1) {
                let t = dp2[l] * c[(j as i64 - l as i64 + wi) as usize].conj();
                if t == ZERO {
                    continue;
                }
                let i0 = l.saturating_sub(w);
                let i1 = (l + w).min(n - 1);
                let dst = &mut a.data[base + (i0 - row0)..=base + (i1 - row0)];
                let src = &c[(i0 as i64 - l as i64 + wi) as usize..=(i1 as i64 - l as i64 + wi) as usize];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += s * t;
                }
            }
            let ik = Complex64::new(0.0, kappa) * dm[j];
            let rows = row0..=(j + band).min(n - 1);
            for (d, i) in a.data[base..=base + (rows.end() - row0)].iter_mut().zip(rows) {
                *d *= ik * dm[i];
            }
        }
        Ok(Self {
            kappa,
            window: *window,
            a,
        })
    }

    /// det(1 − A).
    pub fn determinant(&self) -> Complex64 {
        let mut m = self.a.clone();
        for j in 0..m.dim() {
            for i in j.saturating_sub(m.ku)..=(j + m.kl).min(m.dim() - 1) {
                let v = m.get(i, j);
                m.set(i, j, if i == j { ONE - v } else { -v });
            }
        }
        m.determinant()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::kernel::Section;
    use crate::linalg;
    use crate::spectral::Grid;

    #[test]
    fn agrees_with_dense_section() {
        let g = Grid::unit(32).unwrap();
        let mut c = vec![ZERO; 32];
        for (m, z) in [(0i64, Complex64::new(0.7, 0.1)), (1, Complex64::new(-0.3, 0.4)), (-2, Complex64::new(0.2, -0.5))] {
            c[g.index(m).unwrap()] = z;
        }
        let q = FieldState::from_coefficients(g, c).unwrap();
        let w = Window::new(&g, 30).unwrap();
        for kappa in [1.0, 4.0] {
            let dense = Section::new(&q, kappa, &w).unwrap();
            let band = BandedSection::new(&q, kappa, &w).unwrap();
            let d0 = linalg::determinant(linalg::one_minus(&dense.a));
            assert!((band.determinant() - d0).norm() < 1e-13 * d0.norm());
            assert!((band.a.trace() - dense.trace_a()).norm() < 1e-14);
            assert!((band.a.trace_square() - dense.trace_a2()).norm() < 1e-14);
        }
    }

    #[test]
    fn pivoting_determinant() {
        // tridiagonal with zero diagonal forces row interchanges
        let n = 6;
        let mut m = BandMatrix::zeros(n, 1, 1);
        let mut dense = linalg::CMatrix::zeros(n, n);
        for i in 0..n {
            if i + 1 < n {
                let v = Complex64::new(1.0 + i as f64, 0.5);
                m.set(i, i + 1, v);
                dense[(i, i + 1)] = v;
                let u = Complex64::new(-0.3, 2.0 - i as f64);
                m.set(i + 1, i, u);
                dense[(i + 1, i)] = u;
            }
        }
        let want = linalg::determinant(dense);
        assert!((m.determinant() - want).norm() < 1e-12 * want.norm().max(1.0));
    }
}
