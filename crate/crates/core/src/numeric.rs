//! Double-precision matrices shared by the numeric rank test and the oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// The `n x (n-1)` matrix with rows `(a, a^2, ..., a^{n-2}, z^a - 1)`.
pub fn a_matrix(exponents: &[u64], z: Complex64) -> DMatrix<Complex64> {
    let n = exponents.len();
    DMatrix::from_fn(n, n - 1, |i, j| {
        let a = exponents[i] as f64;
        if j + 1 < n - 1 {
            Complex64::new(a.powi(j as i32 + 1), 0.0)
        } else {
            z.powi(exponents[i] as i32) - 1.0
        }
    })
}

/// Singular values, descending.
pub fn singular_values(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Count of singular values above `tolerance * max(1, sigma_max)`.
pub fn numeric_rank(singular: &[f64], tolerance: f64) -> usize {
    let scale = singular.first().copied().unwrap_or(0.0).max(1.0);
    singular.iter().filter(|&&s| s > tolerance * scale).count()
}
