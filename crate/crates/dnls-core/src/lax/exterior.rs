//! Exact lattice sums over the complement of a window.
//!
//! Each summand of tr(ΛΓ) and tr((ΛΓ)²) is a rational function of the free
//! lattice index with poles off the real axis, so its tail past the window
//! is a finite combination of ψ and ψ′ values. Adding these to a section
//! trace gives the full operator trace with no truncation error.

use std::collections::HashSet;

use num_complex::Complex64;

use super::kernel::NEGLIGIBLE;
use super::window::Window;
use crate::spectral::FieldState;

const SHIFT_TO: f64 = 12.0;

/// Complex digamma ψ(z), z away from the non-positive integers.
pub fn digamma(mut z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < SHIFT_TO {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let w = 1.0 / (z * z);
    // Bernoulli tail B_{2n}/(2n z^{2n}), n = 1..7
    let series = w
        * (-1.0 / 12.0
            + w * (1.0 / 120.0
                + w * (-1.0 / 252.0 + w * (1.0 / 240.0 + w * (-1.0 / 132.0 + w * (691.0 / 32760.0 + w * (-1.0 / 12.0)))))));
    acc + z.ln() - 0.5 / z + series
}

/// Complex trigamma ψ′(z).
pub fn trigamma(mut z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < SHIFT_TO {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let r = 1.0 / z;
    let w = r * r;
    let series = r * w
        * (1.0 / 6.0
            + w * (-1.0 / 30.0 + w * (1.0 / 42.0 + w * (-1.0 / 30.0 + w * (5.0 / 66.0 + w * (-691.0 / 2730.0 + w * (7.0 / 6.0)))))));
    acc + r + 0.5 * w + series
}

/// Σ_{k ≥ k0} Π_j 1/(k − p_j) for at least two poles, each of multiplicity
/// at most two, none on the summation range.
pub fn rational_tail(poles: &[Complex64], k0: i64) -> Complex64 {
    assert!(poles.len() >= 2, "tail needs decay of order at least two");
    let mut distinct: Vec<(Complex64, usize)> = Vec::new();
    for &p in poles {
        match distinct.iter_mut().find(|(q, _)| *q == p) {
            Some(entry) => entry.1 += 1,
            None => distinct.push((p, 1)),
        }
    }
    let start = Complex64::new(k0 as f64, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, &(p, mult)) in distinct.iter().enumerate() {
        // g = Π over the other poles, g′/g = −Σ mult_l/(p − p_l)
        let mut g = Complex64::new(1.0, 0.0);
        let mut log_dg = Complex64::new(0.0, 0.0);
        for (l, &(r, ml)) in distinct.iter().enumerate() {
            if l != i {
                g /= (p - r).powi(ml as i32);
                log_dg -= ml as f64 / (p - r);
            }
        }
        match mult {
            1 => sum -= g * digamma(start - p),
            2 => {
                sum += g * trigamma(start - p);
                sum -= g * log_dg * digamma(start - p);
            }
            _ => panic!("pole multiplicity above two"),
        }
    }
    sum
}

/// Σ_{k ≤ k1} Π_j 1/(k − p_j).
pub fn rational_head(poles: &[Complex64], k1: i64) -> Complex64 {
    let flipped: Vec<Complex64> = poles.iter().map(|p| -p).collect();
    let sign = if poles.len() % 2 == 0 { 1.0 } else { -1.0 };
    sign * rational_tail(&flipped, -k1)
}

/// Σ over k ∉ [lo, hi] (everything when the range is empty).
fn outside(poles: &[Complex64], lo: i64, hi: i64) -> Complex64 {
    let hi = hi.max(lo - 1);
    rational_tail(poles, hi + 1) + rational_head(poles, lo - 1)
}

fn support(q: &FieldState) -> Vec<(i64, Complex64)> {
    let g = q.grid();
    let peak = q.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max);
    (0..g.modes())
        .filter(|&i| q.coefficients()[i].norm() > NEGLIGIBLE * peak)
        .map(|i| (g.wavenumber(i), q.coefficients()[i]))
        .collect()
}

/// tr(iκΛΓ) restricted to index pairs that leave the window.
pub fn trace_a_exterior(q: &FieldState, kappa: f64, window: &Window) -> Complex64 {
    let h = window.spacing();
    let k = window.half_width() as i64;
    let s = kappa / h;
    let mut sum = Complex64::new(0.0, 0.0);
    for (m, c) in support(q) {
        // η = hk, ξ = h(k+m): 1/((κ−iξ)(κ+iη)) = h⁻²/((k − p₁)(k − p₂))
        let poles = [Complex64::new(-(m as f64), -s), Complex64::new(0.0, s)];
        let lo = -k - m.min(0);
        let hi = k - m.max(0);
        sum += c.norm_sqr() * outside(&poles, lo, hi);
    }
    Complex64::new(0.0, kappa) * sum / (h * h)
}

/// tr((iκΛΓ)²) restricted to index quadruples that leave the window.
pub fn trace_a2_exterior(q: &FieldState, kappa: f64, window: &Window) -> Complex64 {
    let h = window.spacing();
    let k = window.half_width() as i64;
    let s = kappa / h;
    let supp = support(q);
    let present: HashSet<i64> = supp.iter().map(|(m, _)| *m).collect();
    let coeff = |m: i64| q.coefficient(m);
    let mut sum = Complex64::new(0.0, 0.0);
    // k₂ = k, k₁ = k+a, k₃ = k+b, k₄ = k+d with weights
    // c(a) c̄(b) c(b−d) c̄(a−d)
    for &(a, ca) in &supp {
        for &(b, cb) in &supp {
            let w_ab = ca * cb.conj();
            for &(e, ce) in &supp {
                let d = b - e;
                if !present.contains(&(a - d)) {
                    continue;
                }
                let w = w_ab * ce * coeff(a - d).conj();
                let poles = [
                    Complex64::new(-(a as f64), -s),
                    Complex64::new(0.0, s),
                    Complex64::new(-(b as f64), -s),
                    Complex64::new(-(d as f64), s),
                ];
                let lo = -k - a.min(b).min(d).min(0);
                let hi = k - a.max(b).max(d).max(0);
                sum += w * outside(&poles, lo, hi);
            }
        }
    }
    -kappa * kappa * sum / h.powi(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::{trace_quadratic, trace_quartic, Section};
    use crate::spectral::Grid;

    #[test]
    fn special_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(Complex64::new(1.0, 0.0)) + euler).norm() < 1e-14);
        assert!((digamma(Complex64::new(0.5, 0.0)) + euler + 2.0 * 2f64.ln()).norm() < 1e-14);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((trigamma(Complex64::new(1.0, 0.0)) - pi2 / 6.0).norm() < 1e-14);
        assert!((trigamma(Complex64::new(0.5, 0.0)) - pi2 / 2.0).norm() < 1e-13);
    }

    #[test]
    fn tails_match_brute_force() {
        let cases: [&[Complex64]; 3] = [
            &[Complex64::new(-1.5, 0.3), Complex64::new(2.0, -0.7)],
            &[Complex64::new(0.0, 0.4), Complex64::new(0.0, 0.4), Complex64::new(3.0, -0.2)],
            &[
                Complex64::new(1.0, -0.5),
                Complex64::new(0.0, 0.5),
                Complex64::new(1.0, -0.5),
                Complex64::new(0.0, 0.5),
            ],
        ];
        for poles in cases {
            let f = |k: i64| poles.iter().fold(Complex64::new(1.0, 0.0), |acc, p| acc / (k as f64 - p));
            let n = poles.len() as i32;
            let cut = 2_000_000i64;
            // brute force plus the leading k^{-n} remainder past the cut
            let rem = 1.0 / ((n - 1) as f64 * (cut as f64).powi(n - 1));
            let up: Complex64 = (5..cut).map(f).sum::<Complex64>() + rem;
            let down: Complex64 = (-cut + 1..=-3).map(f).sum::<Complex64>() + rem * (-1f64).powi(n);
            let tol = 1e-9 * up.norm().max(down.norm());
            assert!((rational_tail(poles, 5) - up).norm() < tol, "{poles:?}");
            assert!((rational_head(poles, -3) - down).norm() < tol, "{poles:?}");
        }
    }

    #[test]
    fn completed_section_traces_meet_closed_forms() {
        let g = Grid::unit(32).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); 32];
        c[g.index(0).unwrap()] = Complex64::new(0.4, 0.1);
        c[g.index(1).unwrap()] = Complex64::new(-0.2, 0.3);
        c[g.index(-2).unwrap()] = Complex64::new(0.1, -0.25);
        let q = FieldState::from_coefficients(g, c).unwrap();
        for &(kappa, half) in &[(2.0, 6usize), (8.0, 20)] {
            let w = Window::new(&g, half).unwrap();
            let s = Section::new(&q, kappa, &w).unwrap();
            let t1 = s.trace_a() + trace_a_exterior(&q, kappa, &w);
            let t2 = s.trace_a2() + trace_a2_exterior(&q, kappa, &w);
            let want1 = trace_quadratic(&q, kappa);
            let want2 = -kappa * kappa * trace_quartic(&q, kappa);
            assert!((t1 - want1).norm() < 1e-12 * want1.norm(), "{t1} vs {want1}");
            assert!((t2 - want2).norm() < 1e-12 * want2.norm(), "{t2} vs {want2}");
        }
    }
}
