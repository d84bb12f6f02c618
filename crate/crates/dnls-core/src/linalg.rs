//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// C = A·B where entries of A (resp. B) vanish for |i−j| > bandwidth.
/// `None` means dense. Loops run down contiguous columns.
pub fn band_mul(a: &CMatrix, a_bw: Option<usize>, b: &CMatrix, b_bw: Option<usize>) -> CMatrix {
    let (n, k) = a.shape();
    let (k2, m) = b.shape();
    assert_eq!(k, k2, "inner dimensions");
    let mut c = CMatrix::zeros(n, m);
    let a_s = a.as_slice();
    let b_s = b.as_slice();
    let c_s = c.as_mut_slice();
    for j in 0..m {
        let (l0, l1) = match b_bw {
            Some(bw) => (j.saturating_sub(bw), (j + bw).min(k - 1)),
            None => (0, k - 1),
        };
        let col = &mut c_s[j * n..(j + 1) * n];
        for l in l0..=l1 {
            let blj = b_s[j * k2 + l];
            if blj == ZERO {
                continue;
            }
            let (i0, i1) = match a_bw {
                Some(bw) => (l.saturating_sub(bw), (l + bw).min(n - 1)),
                None => (0, n - 1),
            };
            let acol = &a_s[l * n..(l + 1) * n];
            for i in i0..=i1 {
                col[i] += acol[i] * blj;
            }
        }
    }
    c
}

pub fn band_sum(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

/// tr(A·B) without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let (n, k) = a.shape();
    assert_eq!(b.shape(), (k, n));
    let mut s = ZERO;
    for i in 0..n {
        for l in 0..k {
            s += a[(i, l)] * b[(l, i)];
        }
    }
    s
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Identity minus `a`.
pub fn one_minus(a: &CMatrix) -> CMatrix {
    let mut m = -a.clone();
    for i in 0..m.nrows() {
        m[(i, i)] += Complex64::new(1.0, 0.0);
    }
    m
}

/// det via partial-pivoting LU.
pub fn determinant(a: CMatrix) -> Complex64 {
    a.lu().determinant()
}

/// Inverse by right-looking LU with partial pivoting followed by column
/// solves; `None` when a pivot vanishes. Works on contiguous columns, which
/// is several times faster than the generic nalgebra route at these sizes.
pub fn inverse(a: &CMatrix) -> Option<CMatrix> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix");
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    {
        let d = lu.as_mut_slice();
        for k in 0..n {
            let col = k * n;
            let p = (k..n)
                .max_by(|&x, &y| d[col + x].norm_sqr().total_cmp(&d[col + y].norm_sqr()))
                .expect("non-empty");
            if d[col + p] == ZERO {
                return None;
            }
            if p != k {
                perm.swap(k, p);
                for c in 0..n {
                    d.swap(c * n + k, c * n + p);
                }
            }
            let inv = d[col + k].inv();
            for z in &mut d[col + k + 1..col + n] {
                *z *= inv;
            }
            for c in k + 1..n {
                let top = d[c * n + k];
                if top == ZERO {
                    continue;
                }
                let (head, tail) = d.split_at_mut(c * n);
                let l = &head[col + k + 1..col + n];
                for (t, &m) in tail[k + 1..n].iter_mut().zip(l) {
                    *t -= m * top;
                }
            }
        }
    }
    // solve L U x = P e_j column by column
    let mut out = CMatrix::zeros(n, n);
    let d = lu.as_slice();
    let o = out.as_mut_slice();
    for j in 0..n {
        let x = &mut o[j * n..(j + 1) * n];
        for (i, &p) in perm.iter().enumerate() {
            if p == j {
                x[i] = Complex64::new(1.0, 0.0);
            }
        }
        for k in 0..n {
            let xk = x[k];
            if xk == ZERO {
                continue;
            }
            for (t, &m) in x[k + 1..].iter_mut().zip(&d[k * n + k + 1..(k + 1) * n]) {
                *t -= m * xk;
            }
        }
        for k in (0..n).rev() {
            x[k] /= d[k * n + k];
            let xk = x[k];
            if xk == ZERO {
                continue;
            }
            for (t, &m) in x[..k].iter_mut().zip(&d[k * n..k * n + k]) {
                *t -= m * xk;
            }
        }
    }
    Some(out)
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values (descending) from a full SVD.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Largest singular value by Golub–Kahan–Lanczos bidiagonalisation with
/// full reorthogonalisation. Converges from below; stops once the top Ritz
/// value is stable to `rel_tol` or the Krylov space is exhausted.
pub fn spectral_norm(a: &CMatrix, rel_tol: f64) -> f64 {
    let (n, m) = a.shape();
    let scale = frobenius(a);
    let ah = a.adjoint();
    spectral_norm_with(n, m, scale, |v| a * v, |u| &ah * u, rel_tol)
}

/// Matrix-free [`spectral_norm`]: `apply` maps C^m to C^n, `adjoint` back.
/// `scale` sets the breakdown threshold (any upper bound for the norm).
pub fn spectral_norm_with<F, G>(n: usize, m: usize, scale: f64, apply: F, adjoint: G, rel_tol: f64) -> f64
where
    F: Fn(&CVector) -> CVector,
    G: Fn(&CVector) -> CVector,
{
    if n == 0 || m == 0 || scale == 0.0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a2b);
    let mut v = CVector::from_fn(m, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    v /= Complex64::new(v.norm(), 0.0);

    let max_steps = n.min(m);
    let mut us: Vec<CVector> = Vec::new();
    let mut vs: Vec<CVector> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut last = 0.0;
    let mut stable = 0;
    for step in 0..max_steps {
        let mut u = apply(&vs[step]);
        if step > 0 {
            u -= &us[step - 1] * Complex64::new(betas[step - 1], 0.0);
        }
        for prev in &us {
            let p = prev.dotc(&u);
            u -= prev * p;
        }
        let alpha = u.norm();
        alphas.push(alpha);
        let exhausted_u = alpha <= 1e-14 * scale;
        if !exhausted_u {
            u /= Complex64::new(alpha, 0.0);
        }
        us.push(u);

        let k = alphas.len();
        let mut b = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            b[(i, i)] = alphas[i];
            if i + 1 < k {
                b[(i, i + 1)] = betas[i];
            }
        }
        let top = b.singular_values().max();
        if exhausted_u {
            return top;
        }
        if (top - last).abs() <= rel_tol * top {
            stable += 1;
            if stable >= 2 {
                return top;
            }
        } else {
            stable = 0;
        }
        last = top;

        let mut w = adjoint(&us[step]) - &vs[step] * Complex64::new(alpha, 0.0);
        for prev in &vs {
            let p = prev.dotc(&w);
            w -= prev * p;
        }
        let beta = w.norm();
        if beta <= 1e-14 * scale {
            return top;
        }
        w /= Complex64::new(beta, 0.0);
        betas.push(beta);
        vs.push(w);
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_matrix(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn inverse_matches_nalgebra() {
        let a = rand_matrix(23, 5);
        let want = a.clone().lu().try_inverse().unwrap();
        let got = inverse(&a).unwrap();
        assert!(frobenius(&(got - want)) < 1e-11);
        assert!(inverse(&CMatrix::zeros(3, 3)).is_none());
    }

    #[test]
    fn band_mul_matches_dense() {
        let n = 17;
        let mut a = rand_matrix(n, 1);
        let mut b = rand_matrix(n, 2);
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > 3 {
                    a[(i, j)] = ZERO;
                }
                if i.abs_diff(j) > 2 {
                    b[(i, j)] = ZERO;
                }
            }
        }
        let want = &a * &b;
        let got = band_mul(&a, Some(3), &b, Some(2));
        assert!(frobenius(&(want.clone() - got)) < 1e-13);
        let got = band_mul(&a, None, &b, None);
        assert!(frobenius(&(want - got)) < 1e-13);
    }

    #[test]
    fn lanczos_norm_matches_svd() {
        for seed in 0..5 {
            let a = rand_matrix(40, seed);
            let s = singular_values(&a)[0];
            let l = spectral_norm(&a, 1e-13);
            assert!((s - l).abs() <= 1e-10 * s, "{s} vs {l}");
        }
    }

    #[test]
    fn norm_of_zero_and_diagonal() {
        assert_eq!(spectral_norm(&CMatrix::zeros(5, 5), 1e-12), 0.0);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(0.1, 0.0),
            Complex64::new(0.0, -0.7),
            Complex64::new(0.3, 0.0),
        ]));
        assert!((spectral_norm(&d, 1e-13) - 0.7).abs() < 1e-14);
    }
}
