use num_complex::Complex64;

use super::grad_alpha;
use crate::error::Result;
use crate::lax::closed::{csch2, weighted_resolvent_sum};
use crate::lax::window::Window;
use crate::spectral::product::{cubic, padded_product};
use crate::spectral::{apply_multiplier, derivative, FieldState};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// 2κ(δA/δq̄ + conj(δA/δq)) with A = tanh(κL/2)·α. The H_κ flow is the
/// derivative of this field.
pub fn hk_direction(q: &FieldState, kappa: f64, window: &Window) -> Result<FieldState> {
    let bundle = grad_alpha(q, kappa, window)?;
    let f = bundle.require()?;
    let t = (0.5 * kappa * q.grid().period()).tanh();
    f.dqbar.combine(Complex64::new(2.0 * kappa * t, 0.0), &f.dq.conj(), Complex64::new(2.0 * kappa * t, 0.0))
}

/// F = iq′ − |q|²q − 2κ(δA/δq̄ + conj(δA/δq)); the difference flow is q_t = F′.
pub fn f_vector_field(q: &FieldState, kappa: f64, window: &Window) -> Result<FieldState> {
    let g = *q.grid();
    let dir = hk_direction(q, kappa, window)?;
    let dq = derivative(q);
    let cub = cubic(q.coefficients());
    let out = (0..g.modes())
        .map(|i| I * dq.coefficients()[i] - cub[i] - dir.coefficients()[i])
        .collect();
    FieldState::from_coefficients(g, out)
}

/// Symbol of the linear part of F: −ξ³/(4κ²+ξ²).
pub fn f_linear_symbol(kappa: f64, xi: f64) -> Complex64 {
    Complex64::new(-xi * xi * xi / (4.0 * kappa * kappa + xi * xi), 0.0)
}

/// Cubic part of F in closed form (no resolvent):
///
///   2∂/(2κ−∂)[q·κu·κv] − 2∂/(2κ+∂)[q·κv̄·κū] + q²·Dq̄ + |q|²·Dq
///   − ½ q·Pq·Mq̄ − ½ q·Mq·Pq̄ + κ³ tanh csch² (S_w u + S̄_w v̄)
///
/// where u = (2κ−∂)^{-1}q, v = (2κ+∂)^{-1}q̄, ū, v̄ their conjugates,
/// D = ∂²/(4κ²−∂²), P = ∂/(2κ−∂), M = ∂/(2κ+∂). The last term is the
/// torus double-pole correction and vanishes as κL → ∞.
pub fn f_cubic(q: &FieldState, kappa: f64) -> FieldState {
    let g = *q.grid();
    let l = g.period();
    let qb = q.conj();
    let k = kappa;
    let mul = |f: &FieldState, s: &dyn Fn(f64) -> Complex64| apply_multiplier(f, s).expect("finite symbol");
    let ku = mul(q, &|xi| k / Complex64::new(2.0 * k, -xi));
    let kvb = mul(q, &|xi| k / Complex64::new(2.0 * k, xi));
    let kv = mul(&qb, &|xi| k / Complex64::new(2.0 * k, xi));
    let kub = mul(&qb, &|xi| k / Complex64::new(2.0 * k, -xi));
    let dd = |xi: f64| Complex64::new(-xi * xi / (4.0 * k * k + xi * xi), 0.0);
    let p = |xi: f64| Complex64::new(0.0, xi) / Complex64::new(2.0 * k, -xi);
    let m = |xi: f64| Complex64::new(0.0, xi) / Complex64::new(2.0 * k, xi);

    let c = |f: &FieldState| f.coefficients().to_vec();
    let qc = c(q);
    let qbc = c(&qb);
    let first = padded_product(&[&qc, ku.coefficients(), kv.coefficients()], 2);
    let second = padded_product(&[&qc, kvb.coefficients(), kub.coefficients()], 2);
    let dqb = c(&mul(&qb, &dd));
    let dq = c(&mul(q, &dd));
    let t3 = padded_product(&[&qc, &qc, &dqb], 2);
    let t4 = padded_product(&[&qc, &qbc, &dq], 2);
    let pq = c(&mul(q, &p));
    let mqb = c(&mul(&qb, &m));
    let mq = c(&mul(q, &m));
    let pqb = c(&mul(&qb, &p));
    let t5 = padded_product(&[&qc, &pq, &mqb], 2);
    let t6 = padded_product(&[&qc, &mq, &pqb], 2);

    let sw = weighted_resolvent_sum(q, kappa);
    let corr = k * k * k * (0.5 * k * l).tanh() * csch2(k, l);

    let out = (0..g.modes())
        .map(|i| {
            let xi = g.frequency(i);
            let two_d = Complex64::new(0.0, 2.0 * xi);
            two_d / Complex64::new(2.0 * k, -xi) * first[i] - two_d / Complex64::new(2.0 * k, xi) * second[i] + t3[i]
                + t4[i]
                - 0.5 * t5[i]
                - 0.5 * t6[i]
                + corr * (sw * ku.coefficients()[i] + sw.conj() * kvb.coefficients()[i]) / k
        })
        .collect();
    FieldState::from_coefficients(g, out).expect("finite cubic term")
}
