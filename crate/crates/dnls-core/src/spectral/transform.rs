//! FFT plumbing. Plans are cached per (size, direction) and shared read-only.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((len, forward))
        .or_insert_with(|| {
            let dir = if forward {
                FftDirection::Forward
            } else {
                FftDirection::Inverse
            };
            FftPlanner::new().plan_fft(len, dir)
        })
        .clone()
}

/// Samples to Fourier-series coefficients: c_k = N⁻¹ Σ_j q_j e^{-2πijk/N}.
pub fn forward(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    plan(n, true).process(&mut buf);
    let inv = 1.0 / n as f64;
    for v in &mut buf {
        *v *= inv;
    }
    buf
}

/// Coefficients to samples: q_j = Σ_k c_k e^{2πijk/N}.
pub fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    plan(buf.len(), false).process(&mut buf);
    buf
}

/// Embed `coeffs` (FFT order, length n) into a grid of length `n * factor`
/// and return physical samples there.
pub fn padded_samples(coeffs: &[Complex64], factor: usize) -> Vec<Complex64> {
    let n = coeffs.len();
    let np = n * factor;
    let mut big = vec![Complex64::new(0.0, 0.0); np];
    for (i, &c) in coeffs.iter().enumerate() {
        let m = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
        big[m.rem_euclid(np as i64) as usize] = c;
    }
    inverse(&big)
}

/// Inverse of [`padded_samples`]: transform padded samples and keep the
/// wavenumbers representable on the length-n grid.
pub fn unpadded_coefficients(samples: &[Complex64], n: usize) -> Vec<Complex64> {
    let np = samples.len();
    let big = forward(samples);
    (0..n)
        .map(|i| {
            let m = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
            big[m.rem_euclid(np as i64) as usize]
        })
        .collect()
}
