use num_complex::Complex64;

use super::field::FieldState;
use super::transform;

/// Pointwise product of band-limited factors, formed on a grid `pad` times
/// finer and projected back onto the original wavenumbers.
///
/// With `k` factors supported in |m| ≤ S the product is alias-free whenever
/// k·S < pad·N − N/2; pad = 2 covers cubic terms of 2/3-rule data.
pub fn padded_product(factors: &[&[Complex64]], pad: usize) -> Vec<Complex64> {
    assert!(!factors.is_empty());
    let n = factors[0].len();
    let mut acc = transform::padded_samples(factors[0], pad);
    for f in &factors[1..] {
        let s = transform::padded_samples(f, pad);
        for (a, b) in acc.iter_mut().zip(&s) {
            *a *= b;
        }
    }
    transform::unpadded_coefficients(&acc, n)
}

/// Coefficients of |q|²q, alias-free for 2/3-rule data.
pub fn cubic(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let s = transform::padded_samples(coeffs, 2);
    let prod: Vec<Complex64> = s.iter().map(|z| z * z.norm_sqr()).collect();
    transform::unpadded_coefficients(&prod, n)
}

pub fn product_fields(factors: &[&FieldState], pad: usize) -> FieldState {
    let grid = *factors[0].grid();
    let slices: Vec<&[Complex64]> = factors.iter().map(|f| f.coefficients()).collect();
    FieldState::from_coefficients(grid, padded_product(&slices, pad)).expect("finite product")
}

/// ∫₀ᴸ Π f_i dx computed exactly from a padded grid (band of the product
/// must stay below pad·N/2).
pub fn padded_integral(factors: &[&[Complex64]], pad: usize, period: f64) -> Complex64 {
    let mut acc = transform::padded_samples(factors[0], pad);
    for f in &factors[1..] {
        let s = transform::padded_samples(f, pad);
        for (a, b) in acc.iter_mut().zip(&s) {
            *a *= b;
        }
    }
    let n = acc.len() as f64;
    acc.iter().sum::<Complex64>() * (period / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_field, Grid};
    use std::f64::consts::PI;

    #[test]
    fn cubic_of_plane_wave() {
        let g = Grid::unit(32).unwrap();
        let q = make_field(g, |x| Complex64::from_polar(0.5, 2.0 * PI * 3.0 * x)).unwrap();
        let c = cubic(q.coefficients());
        for (i, v) in c.iter().enumerate() {
            let want = if g.wavenumber(i) == 3 { 0.125 } else { 0.0 };
            assert!((v - want).norm() < 1e-15);
        }
    }

    #[test]
    fn cubic_is_alias_free_on_dealiased_band() {
        let g = Grid::unit(32).unwrap();
        // modes at ±10 = N/3: the cubic band reaches 30 and must not fold back
        let q = make_field(g, |x| {
            Complex64::from_polar(1.0, 2.0 * PI * 10.0 * x)
                + Complex64::from_polar(0.7, -2.0 * PI * 10.0 * x)
        })
        .unwrap();
        let c = cubic(q.coefficients());
        let dense = 4096;
        let gd = Grid::unit(dense).unwrap();
        let qd = make_field(gd, |x| {
            Complex64::from_polar(1.0, 2.0 * PI * 10.0 * x)
                + Complex64::from_polar(0.7, -2.0 * PI * 10.0 * x)
        })
        .unwrap();
        let cd = cubic(qd.coefficients());
        for i in 0..32 {
            let m = g.wavenumber(i);
            let j = gd.index(m).unwrap();
            assert!((c[i] - cd[j]).norm() < 1e-14, "m = {m}");
        }
    }
}
