//! Dense complex matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative singular-value threshold for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-8;

/// Largest singular value, from the top eigenvalue of `A†A`.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v)).sqrt()
}

/// Largest singular value by power iteration on `A†A`. Slower and less
/// accurate than [`spectral_norm`]; kept as an independent cross-check.
pub fn spectral_norm_power(a: &CMatrix, iterations: usize) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    let n = gram.ncols();
    // Deterministic start with no special alignment to coordinate axes.
    let mut v = CVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.37 * i as f64, 0.11 * (i as f64 + 1.0)));
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let w = &gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm / v.norm();
        v = w.unscale(norm);
    }
    lambda.sqrt()
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    a.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Sum of singular values.
pub fn trace_norm(a: &CMatrix) -> f64 {
    singular_values(a).iter().sum()
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_hermitian_eigenvalue(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let h = (a + a.adjoint()).unscale(2.0);
    h.symmetric_eigen().eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v))
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// Numerical rank with threshold `RANK_TOL · σ_max`.
pub fn rank(a: &CMatrix) -> usize {
    let sv = singular_values(a);
    let top = sv.iter().fold(0.0f64, |m, &s| m.max(s));
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Entrywise (Hadamard) product.
pub fn schur_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.component_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn norms_of_small_matrices() {
        let ones = CMatrix::from_element(2, 2, c(1.0));
        assert!((spectral_norm(&ones) - 2.0).abs() < 1e-12);
        assert!((trace_norm(&ones) - 2.0).abs() < 1e-12);
        let swap = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        assert!((spectral_norm(&swap) - 1.0).abs() < 1e-12);
        assert!((spectral_norm_power(&ones, 50) - 2.0).abs() < 1e-9);
        assert_eq!(rank(&ones), 1);
        assert_eq!(spectral_norm(&CMatrix::zeros(0, 0)), 0.0);
    }

    #[test]
    fn power_iteration_agrees_on_complex_input() {
        let a = CMatrix::from_fn(4, 4, |i, j| Complex64::new((i * 3 + j) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0 - 1.0));
        assert!((spectral_norm(&a) - spectral_norm_power(&a, 2000)).abs() < 1e-8);
    }
}
