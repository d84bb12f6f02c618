use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::constants::*;
use super::report::{Check, ExperimentReport};
use crate::error::Result;
use crate::io::CsvTable;
use crate::lax::hs::lattice_sum_reach;
use crate::linalg::{self, CMatrix, CVector};
use crate::spectral::transform::{forward, inverse};
use crate::spectral::{littlewood_paley, FieldState, Grid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityConfig {
    /// Random matrices for the det/exp-trace lemma and random pairs for the
    /// unwrapping lemma.
    pub draws: usize,
    pub max_dim: usize,
    /// Dyadic block frequencies N of the ratio tables.
    pub blocks: Vec<u64>,
    pub kappas: Vec<f64>,
}

impl Default for InequalityConfig {
    fn default() -> Self {
        Self {
            draws: 10_000,
            max_dim: 6,
            blocks: (1..=10).map(|j| 1u64 << j).collect(),
            kappas: (0..=8).map(|j| (1u64 << j) as f64).collect(),
        }
    }
}

/// (|det(1+A) − e^{tr A}|, ½‖A‖²_HS e^{‖A‖_tc}).
pub fn det2ish_sides(a: &CMatrix) -> (f64, f64) {
    let n = a.nrows();
    let one_plus = CMatrix::identity(n, n) + a;
    let lhs = (linalg::determinant(one_plus) - linalg::trace(a).exp()).norm();
    let hs = linalg::frobenius(a);
    let tc: f64 = linalg::singular_values(a).iter().sum();
    (lhs, 0.5 * hs * hs * tc.exp())
}

/// (|Im(z − w)|, π e^C / sin(ε/2) · |e^w − e^z|).
pub fn unwrap_sides(z: Complex64, w: Complex64, c: f64, eps: f64) -> (f64, f64) {
    ((z - w).im.abs(), PI * c.exp() / (0.5 * eps).sin() * (w.exp() - z.exp()).norm())
}

fn exceeds(lhs: f64, rhs: f64) -> bool {
    lhs > rhs * (1.0 + 1e-10) + 1e-15
}

/// cot z, stable for large |Im z|.
fn cot(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im >= 0.0 {
        let w = (2.0 * i * z).exp();
        i * (w + 1.0) / (w - 1.0)
    } else {
        let w = (-2.0 * i * z).exp();
        i * (1.0 + w) / (1.0 - w)
    }
}

/// Σ_{η∈Δℤ} 1/((κ²+η²)(κ²+(η+ξ)²)), Δ = 2π/L, by residues of π/Δ·cot(πz/Δ).
pub fn lorentz_pair_sum(kappa: f64, xi: f64, period: f64) -> f64 {
    let h = 2.0 * PI / period;
    if xi.abs() < 1e-9 * kappa {
        // −g′(κ)/2κ with g(κ) = Σ 1/(κ²+η²) = (π/hκ) coth(πκ/h)
        let x = PI * kappa / h;
        let coth = 1.0 / x.tanh();
        let csch2 = 1.0 / x.sinh().powi(2);
        let dg = -PI / (h * kappa * kappa) * coth - PI / (h * kappa) * (PI / h) * csch2;
        return -dg / (2.0 * kappa);
    }
    let i = Complex64::i();
    let poles = [i * kappa, -i * kappa, -xi + i * kappa, -xi - i * kappa];
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, &p) in poles.iter().enumerate() {
        let mut den = Complex64::new(1.0, 0.0);
        for (k, &r) in poles.iter().enumerate() {
            if k != j {
                den *= p - r;
            }
        }
        sum += cot(PI * p / h) / den;
    }
    -(PI / h * sum).re
}

/// Σ_{η∈Δℤ} (κ²+η²)^{-3/4}: direct core plus Euler–Maclaurin tail.
pub fn three_quarter_sum(kappa: f64, period: f64) -> f64 {
    let h = 2.0 * PI / period;
    let g = |eta: f64| (kappa * kappa + eta * eta).powf(-0.75);
    let k0 = ((64.0 * kappa / h).ceil() as i64).max(1000);
    let mut core = 0.0;
    for k in (1..=k0).rev() {
        core += 2.0 * g(k as f64 * h);
    }
    core += g(0.0);
    let a = (k0 + 1) as f64 * h;
    // ∫_a^∞ g = 2a ∫_0^1 (κ²u⁴ + a²)^{-3/4} du after η = a/u²
    let integral = 2.0 * a * quadrature::integrate(|u| (kappa * kappa * u.powi(4) + a * a).powf(-0.75), 0.0, 1.0, 1e-15).integral;
    let dg = -1.5 * a * (kappa * kappa + a * a).powf(-1.75);
    core + 2.0 * (integral / h + 0.5 * g(a) - h * dg / 12.0)
}

/// ‖P_K (κ−∂)^{-p} q (κ+∂)^{-p} P_K‖_op on the window |k| ≤ K, applied
/// matrix-free through zero-padded FFT convolution.
pub fn sandwich_op_norm(q: &FieldState, kappa: f64, power: f64, half_width: usize) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let g = q.grid();
    let dxi = g.dxi();
    let support = (0..g.modes())
        .filter(|&i| q.coefficients()[i].norm_sqr() > 0.0)
        .map(|i| g.wavenumber(i).unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    let k = half_width as i64;
    let n = 2 * half_width + 1;
    let p = (2 * half_width + support + 1).next_power_of_two();
    let slot = |m: i64| m.rem_euclid(p as i64) as usize;
    let mut c = vec![Complex64::new(0.0, 0.0); p];
    for i in 0..g.modes() {
        c[slot(g.wavenumber(i))] = q.coefficients()[i];
    }
    let q_samples = inverse(&c);
    let qbar_samples: Vec<Complex64> = q_samples.iter().map(|z| z.conj()).collect();
    let freq = |j: usize| (j as i64 - k) as f64 * dxi;
    let left: Vec<Complex64> = (0..n).map(|j| Complex64::new(kappa, -freq(j)).powf(-power)).collect();
    let right: Vec<Complex64> = (0..n).map(|j| Complex64::new(kappa, freq(j)).powf(-power)).collect();
    let convolve = |v: &CVector, inner: &[Complex64], samples: &[Complex64], outer: &[Complex64]| -> CVector {
        let mut buf = vec![Complex64::new(0.0, 0.0); p];
        for j in 0..n {
            buf[slot(j as i64 - k)] = v[j] * inner[j];
        }
        let mut s = inverse(&buf);
        for (x, y) in s.iter_mut().zip(samples) {
            *x *= y;
        }
        let out = forward(&s);
        CVector::from_fn(n, |j, _| out[slot(j as i64 - k)] * outer[j])
    };
    let left_conj: Vec<Complex64> = left.iter().map(|z| z.conj()).collect();
    let right_conj: Vec<Complex64> = right.iter().map(|z| z.conj()).collect();
    let young = q.coefficients().iter().map(|z| z.norm()).sum::<f64>() * kappa.powf(-2.0 * power);
    linalg::spectral_norm_with(
        n,
        n,
        young,
        |v| convolve(v, &right, &q_samples, &left),
        |u| convolve(u, &left_conj, &qbar_samples, &right_conj),
        1e-10,
    )
}

/// ‖(κ+∂)^{-1} f (κ−∂)^{-1}‖²_HS = Σ_m |f̂_m|² Σ_η 1/((κ²+η²)(κ²+(η+ξ_m)²)).
pub fn resolvent_sandwich_hs_sq(f: &FieldState, kappa: f64) -> f64 {
    let g = f.grid();
    (0..g.modes())
        .filter(|&i| f.coefficients()[i].norm_sqr() > 0.0)
        .map(|i| f.coefficients()[i].norm_sqr() * lorentz_pair_sum(kappa, g.frequency(i), g.period()))
        .sum()
}

/// ‖f‖²_{H^{-1}_κ} = Σ L|f̂|²/(4κ²+ξ²).
pub fn h_minus_one_sq(f: &FieldState, kappa: f64) -> f64 {
    let g = f.grid();
    g.period()
        * (0..g.modes())
            .map(|i| {
                let xi = g.frequency(i);
                f.coefficients()[i].norm_sqr() / (4.0 * kappa * kappa + xi * xi)
            })
            .sum::<f64>()
}

fn lp_log(n: f64, kappa: f64) -> f64 {
    ((4.0 + n * n / (kappa * kappa)).ln() / (kappa + n)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub block: f64,
    pub kappa: f64,
    pub hs: f64,
    pub op: f64,
    pub op_sum: f64,
    pub est1: f64,
    pub est2: f64,
    pub est3: f64,
}

/// Random field with flat normal spectrum on 1 ≤ |m| ≤ 2·max block on the
/// 2π torus (ξ = m), so every Littlewood–Paley block is populated.
fn sweep_field(rng: &mut ChaCha8Rng, top_block: u64) -> Result<FieldState> {
    let band = 2 * top_block as i64;
    let modes = (3 * band as usize + 2).next_power_of_two();
    let grid = Grid::new(modes, 2.0 * PI)?;
    let mut c = vec![Complex64::new(0.0, 0.0); modes];
    for m in -band..=band {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c[grid.index(m).expect("band fits")] = Complex64::new(re, im);
    }
    FieldState::from_coefficients(grid, c)
}

/// Ratio of each operator estimate to its comparator over the (N, κ) sweep.
pub fn ratio_tables(q: &FieldState, blocks: &[u64], kappas: &[f64]) -> Vec<RatioRow> {
    let pieces = littlewood_paley(q);
    let norm = q.l2_norm();
    let period = q.grid().period();
    let mut rows = Vec::new();
    for &kappa in kappas {
        let mut op_partial = 0.0;
        let est2 = (three_quarter_sum(kappa, period) * kappa.sqrt() / period).sqrt();
        for (n, piece) in &pieces {
            let nf = *n as f64;
            let reach = 4 * (2 * (*n as usize)).max(kappa as usize / 1).max(8);
            let window = (reach as f64 / q.grid().dxi()).ceil() as usize;
            let op = sandwich_op_norm(piece, kappa, 0.5, window);
            op_partial += op;
            if !blocks.contains(n) {
                continue;
            }
            let g = piece.grid();
            let hs_sq: f64 = (0..g.modes())
                .filter(|&i| piece.coefficients()[i].norm_sqr() > 0.0)
                .map(|i| piece.coefficients()[i].norm_sqr() * lattice_sum_reach(kappa, g.frequency(i), period, 4.0))
                .sum();
            let pn = piece.l2_norm();
            let est3 = sandwich_op_norm(piece, kappa, 0.25, window) / pn;
            rows.push(RatioRow {
                block: nf,
                kappa,
                hs: hs_sq.sqrt() / (lp_log(nf, kappa) * pn),
                op: op / ((nf.sqrt() / kappa).min(lp_log(nf, kappa)) * pn),
                op_sum: op_partial / (nf.sqrt().min(kappa.sqrt()) / kappa * norm),
                est1: resolvent_sandwich_hs_sq(piece, kappa).sqrt() / (h_minus_one_sq(piece, kappa).sqrt() / kappa.sqrt()),
                est2,
                est3,
            });
        }
    }
    rows
}

fn min_max(values: impl Iterator<Item = f64>) -> [f64; 2] {
    values.fold([f64::INFINITY, 0.0], |[lo, hi], v| [lo.min(v), hi.max(v)])
}

/// Randomised checks of the det/exp-trace and unwrapping lemmas plus the
/// ratio tables of the operator estimates.
pub fn inequality_suite(seed: u64, cfg: &InequalityConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "inequality_suite",
        serde_json::json!({ "seed": seed, "config": serde_json::to_value(cfg)? }),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut det_bad = 0usize;
    let mut det_worst = 0.0f64;
    for _ in 0..cfg.draws {
        let n = rng.random_range(1..=cfg.max_dim.max(1));
        let scale = 10f64.powf(rng.random_range(-2.0..0.3)) / (n as f64).sqrt();
        let a = CMatrix::from_fn(n, n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * scale
        });
        let (lhs, rhs) = det2ish_sides(&a);
        det_bad += exceeds(lhs, rhs) as usize;
        if rhs > 0.0 {
            det_worst = det_worst.max(lhs / rhs);
        }
    }
    // rank one: |(1+λ) − e^λ| ≤ ½|λ|² e^{|λ|} on a grid in |λ| ≤ 2
    let mut scalar_bad = 0usize;
    for i in -20..=20 {
        for j in -20..=20 {
            let l = Complex64::new(i as f64 / 10.0, j as f64 / 10.0);
            if l.norm() <= 2.0 {
                scalar_bad += exceeds((1.0 + l - l.exp()).norm(), 0.5 * l.norm_sqr() * l.norm().exp()) as usize;
            }
        }
    }
    report.record("det2ish_worst_ratio", det_worst);
    report.check("det2ish_violations", Check::at_most(det_bad as f64, 0.0));
    report.check("det2ish_scalar_violations", Check::at_most(scalar_bad as f64, 0.0));

    let mut unwrap_bad = 0usize;
    let mut unwrap_worst = 0.0f64;
    for d in 0..cfg.draws {
        let c = rng.random_range(0.01..3.0);
        let eps = rng.random_range(0.05..PI - 0.05);
        let im = |r: &mut ChaCha8Rng| r.random_range(1e-9..2.0 * PI - eps);
        // every third pair sits on the extremal edge Re z = Re w = −C
        let (rz, rw) = if d % 3 == 0 {
            (-c, -c)
        } else {
            (rng.random_range(-c..=c), rng.random_range(-c..=c))
        };
        let z = Complex64::new(rz, im(&mut rng));
        let w = Complex64::new(rw, im(&mut rng));
        let (lhs, rhs) = unwrap_sides(z, w, c, eps);
        unwrap_bad += exceeds(lhs, rhs) as usize;
        if rhs > 0.0 {
            unwrap_worst = unwrap_worst.max(lhs / rhs);
        }
    }
    report.record("unwrap_worst_ratio", unwrap_worst);
    report.check("unwrap_violations", Check::at_most(unwrap_bad as f64, 0.0));

    let top = cfg.blocks.iter().copied().max().unwrap_or(2);
    let field = sweep_field(&mut rng, top)?;
    let rows = ratio_tables(&field, &cfg.blocks, &cfg.kappas);
    let tables: [(&str, fn(&RatioRow) -> f64, [f64; 2]); 6] = [
        ("hs", |r| r.hs, HS_RATIO),
        ("op", |r| r.op, OP_RATIO),
        ("op_sum", |r| r.op_sum, OP_SUM_RATIO),
        ("est1", |r| r.est1, EST1_RATIO),
        ("est2", |r| r.est2, EST2_RATIO),
        ("est3", |r| r.est3, EST3_RATIO),
    ];
    for (name, get, [lo, hi]) in tables {
        let [min, max] = min_max(rows.iter().map(get));
        report.record(&format!("{name}_ratio_min"), min);
        report.record(&format!("{name}_ratio_max"), max);
        report.check(&format!("{name}_ratio_min"), Check::within(min, lo, hi));
        report.check(&format!("{name}_ratio_max"), Check::within(max, lo, hi));
    }
    let [min, max] = min_max(rows.iter().map(|r| r.hs));
    report.check("hs_ratio_spread", Check::at_most(max / min, HS_RATIO_SPREAD));

    let mut table = CsvTable::new(&["N", "kappa", "hs", "op", "op_sum", "est1", "est2", "est3"]);
    for r in &rows {
        table.push_numbers(&[r.block, r.kappa, r.hs, r.op, r.op_sum, r.est1, r.est2, r.est3]);
    }
    report.table("operator_ratios.csv", table);
    Ok(report.conclude())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::build_lambda;
    use crate::lax::Window;

    #[test]
    fn zero_matrix_is_tight() {
        let (lhs, rhs) = det2ish_sides(&CMatrix::zeros(3, 3));
        assert_eq!((lhs, rhs), (0.0, 0.0));
    }

    #[test]
    fn lorentz_sum_matches_direct_summation() {
        for &(kappa, xi, l) in &[(1.0, 3.0, 2.0 * PI), (2.0, 0.0, 1.0), (4.0, 2.0 * PI, 1.0), (1.0, 1e-12, 2.0 * PI)] {
            let h = 2.0 * PI / l;
            let direct: f64 = (-200_000i64..=200_000)
                .map(|k| {
                    let e = k as f64 * h;
                    1.0 / ((kappa * kappa + e * e) * (kappa * kappa + (e + xi) * (e + xi)))
                })
                .sum();
            let got = lorentz_pair_sum(kappa, xi, l);
            assert!((got - direct).abs() < 1e-10 * direct, "{kappa} {xi}: {got} vs {direct}");
        }
    }

    #[test]
    fn three_quarter_sum_converges() {
        let direct: f64 = (-4_000_000i64..=4_000_000).map(|k| (1.0 + (k as f64).powi(2)).powf(-0.75)).sum();
        // remaining tail 2·2/√(4e6) = 2e-3, added analytically
        let got = three_quarter_sum(1.0, 2.0 * PI);
        assert!((got - direct - 4.0 / 2000.0).abs() < 1e-6, "{got} vs {direct}");
    }

    #[test]
    fn matrix_free_norm_matches_dense_section() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = sweep_field(&mut rng, 4).unwrap();
        let q = FieldState::from_coefficients(g, (0..64).map(|i| q.coefficient(g.wavenumber(i))).collect()).unwrap();
        let w = Window::new(&g, 20).unwrap();
        let dense = build_lambda(&q, 2.0, &w).unwrap().op_norm();
        let free = sandwich_op_norm(&q, 2.0, 0.5, 20);
        assert!((dense - free).abs() < 1e-9 * dense, "{dense} vs {free}");
    }

    #[test]
    fn unwrap_extremal_case() {
        // equal real parts at −C, imaginary gap π: bound is 2π/sin(ε/2) · e^{-C}e^{C}/… ≥ π
        let (lhs, rhs) = unwrap_sides(Complex64::new(-1.0, 0.1), Complex64::new(-1.0, 0.1 + PI), 1.0, 0.5);
        assert!(lhs <= rhs);
    }
}
