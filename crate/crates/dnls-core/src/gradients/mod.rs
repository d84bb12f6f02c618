//! Functional derivatives of α(κ;q), the auxiliary field γ, and the vector
//! field F of the difference flow.
//!
//! Gradients pair as δα = ∫ (δα/δq · δq + δα/δq̄ · δq̄) dx. They are read off
//! kernel diagonals of the resummed resolvent R = (1 − iκΛΓ)^{-1}, with the
//! index convention entry(row, col) ↦ coefficient row − col.

mod identities;
mod vector_field;

pub use identities::{identity_residuals, residuals_of, IdentityResiduals};
pub use vector_field::{f_cubic, f_linear_symbol, f_vector_field, hk_direction};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lax::closed::{csch2, resolvent_pair, torus_factor, weighted_resolvent_sum};
use crate::lax::kernel::{half_resolvents, Section};
use crate::lax::series::GUARD;
use crate::lax::window::{Window, WindowPolicy};
use crate::linalg::{self, CMatrix};
use crate::spectral::product::padded_product;
use crate::spectral::{FieldState, Grid};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct GradientFields {
    /// δα/δq
    pub dq: FieldState,
    /// δα/δq̄
    pub dqbar: FieldState,
    pub gamma: FieldState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientBundle {
    pub kappa: f64,
    /// √κ‖Λ‖_op on the section used.
    pub guard: f64,
    /// Absent when the guard failed.
    pub fields: Option<GradientFields>,
}

impl GradientBundle {
    pub fn resolvent_ok(&self) -> bool {
        self.fields.is_some()
    }

    /// The fields, or a guard error.
    pub fn require(&self) -> Result<&GradientFields> {
        self.fields.as_ref().ok_or(Error::Guard {
            kappa: self.kappa,
            guard: self.guard,
        })
    }
}

/// Window settings for gradient evaluation; flows use the same.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientOptions {
    pub policy: WindowPolicy,
}

impl Default for GradientOptions {
    fn default() -> Self {
        Self {
            policy: WindowPolicy::with_kappa_factor(8.0),
        }
    }
}

impl GradientOptions {
    pub fn window(&self, q: &FieldState, kappa: f64) -> Result<Window> {
        self.policy.window(q, kappa)
    }
}

/// Σ_{row−col=m} w_r(row)·M(row,col)·w_c(col), placed at grid wavenumber m.
fn diagonal_sums(m: &CMatrix, row_w: &[Complex64], col_w: &[Complex64], grid: &Grid, scale: Complex64) -> Vec<Complex64> {
    let n = m.nrows();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.modes()];
    for j in 0..n {
        for i in 0..n {
            let e = m[(i, j)];
            if e.re == 0.0 && e.im == 0.0 {
                continue;
            }
            if let Some(k) = grid.index(i as i64 - j as i64) {
                out[k] += row_w[i] * e * col_w[j];
            }
        }
    }
    for c in &mut out {
        *c *= scale;
    }
    out
}

fn resolvent(section: &Section) -> Result<CMatrix> {
    let kappa = section.kappa();
    let one_minus = linalg::one_minus(&section.a);
    let norm = linalg::frobenius(&one_minus);
    let r = linalg::inverse(&one_minus).ok_or(Error::SingularResolvent {
        kappa,
        condition: f64::INFINITY,
    })?;
    let condition = norm * linalg::frobenius(&r);
    if !condition.is_finite() || condition > 1e12 {
        return Err(Error::SingularResolvent { kappa, condition });
    }
    Ok(r)
}

/// Closed-form gradients of tr(iκΛΓ) + ½tr((iκΛΓ)²) and the quadratic part
/// of γ, on the grid of `q`.
struct LowOrder {
    dq: Vec<Complex64>,
    dqbar: Vec<Complex64>,
    gamma: Vec<Complex64>,
}

fn low_order(q: &FieldState, kappa: f64) -> LowOrder {
    let g = q.grid();
    let l = g.period();
    let coth = torus_factor(kappa, l);
    let cs = csch2(kappa, l);
    let sw = weighted_resolvent_sum(q, kappa);
    let (u, v) = resolvent_pair(q, kappa);
    let qb = q.conj();
    let quv = padded_product(&[q.coefficients(), &u, &v], 2);
    let qbuv = padded_product(&[qb.coefficients(), &u, &v], 2);
    let uv = padded_product(&[&u, &v], 2);
    let n = g.modes();
    let mut dq = Vec::with_capacity(n);
    let mut dqbar = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let k2 = kappa * kappa;
    for i in 0..n {
        let xi = g.frequency(i);
        let rm = Complex64::new(2.0 * kappa, -xi).inv();
        let rp = Complex64::new(2.0 * kappa, xi).inv();
        let t1_qb = coth * I * kappa * u[i];
        let t1_q = coth * I * kappa * v[i];
        let t2_qb = -k2 * (coth * 4.0 * rm * quv[i] + cs * sw * u[i]);
        let t2_q = -k2 * (coth * 4.0 * rp * qbuv[i] + cs * sw * v[i]);
        dqbar.push(t1_qb + 0.5 * t2_qb);
        dq.push(t1_q + 0.5 * t2_q);
        gamma.push(2.0 * I * kappa * coth * uv[i]);
    }
    gamma[0] += I * kappa * cs * sw * 0.5;
    LowOrder { dq, dqbar, gamma }
}

/// δα/δq, δα/δq̄ and γ at κ on the given window.
///
/// Terms through quadratic order in the resolvent expansion are exact closed
/// forms; the section supplies R − 1 − A and its Γ/Λ conjugates.
pub fn grad_alpha(q: &FieldState, kappa: f64, window: &Window) -> Result<GradientBundle> {
    let section = Section::new(q, kappa, window)?;
    let guard = section.guard();
    if guard >= GUARD {
        return Ok(GradientBundle {
            kappa,
            guard,
            fields: None,
        });
    }
    let grid = q.grid();
    let low = low_order(q, kappa);
    if q.is_zero() {
        let z = FieldState::zeros(*grid);
        return Ok(GradientBundle {
            kappa,
            guard,
            fields: Some(GradientFields {
                dq: z.clone(),
                dqbar: z.clone(),
                gamma: z,
            }),
        });
    }
    let lam = &section.lambda;
    let gam = &section.gamma;
    let a = &section.a;
    let r = resolvent(&section)?;
    // R − 1 − A
    let mut tail = r;
    for i in 0..tail.nrows() {
        tail[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    let r_minus_one = tail.clone();
    tail -= a;

    let tail_lam = linalg::band_mul(&tail, None, &lam.entries, lam.band());
    let gam_tail = linalg::band_mul(&gam.entries, gam.band(), &tail, None);
    // R′ = (1 − iκΓΛ)^{-1} = 1 + iκΓRΛ, so R′ − 1 − A′ = iκΓ(R − 1)Λ
    let gam_r = linalg::band_mul(&gam.entries, gam.band(), &r_minus_one, None);
    let mut tail_prime = linalg::band_mul(&gam_r, None, &lam.entries, lam.band());
    tail_prime *= I * kappa;

    let (dm, dp) = half_resolvents(kappa, window);
    let l = grid.period();
    let scale = I * kappa / l;
    let sec_qbar = diagonal_sums(&tail_lam, &dm, &dp, grid, scale);
    let sec_q = diagonal_sums(&gam_tail, &dp, &dm, grid, scale);
    let inv_l = Complex64::new(1.0 / l, 0.0);
    let sec_g1 = diagonal_sums(&tail, &dm, &dm, grid, inv_l);
    let sec_g2 = diagonal_sums(&tail_prime, &dp, &dp, grid, inv_l);

    let add = |x: Vec<Complex64>, y: &[Complex64]| -> Vec<Complex64> { x.iter().zip(y).map(|(x, y)| x + y).collect() };
    let dqbar = add(sec_qbar, &low.dqbar);
    let dq = add(sec_q, &low.dq);
    let gamma: Vec<Complex64> = sec_g1
        .iter()
        .zip(&sec_g2)
        .zip(&low.gamma)
        .map(|((x, y), z)| x + y + z)
        .collect();
    Ok(GradientBundle {
        kappa,
        guard,
        fields: Some(GradientFields {
            dq: FieldState::from_coefficients(*grid, dq)?,
            dqbar: FieldState::from_coefficients(*grid, dqbar)?,
            gamma: FieldState::from_coefficients(*grid, gamma)?,
        }),
    })
}

/// γ(κ;q) alone; `None` when the guard fails.
pub fn gamma_field(q: &FieldState, kappa: f64, window: &Window) -> Result<Option<FieldState>> {
    Ok(grad_alpha(q, kappa, window)?.fields.map(|f| f.gamma))
}

/// ∫ (G_q h + G_q̄ h̄) dx, the first variation of α along h.
pub fn pairing(fields: &GradientFields, h: &FieldState) -> Complex64 {
    fields.dq.bilinear(h) + fields.dqbar.bilinear(&h.conj())
}
