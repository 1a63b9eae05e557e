//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's continued fraction, factorization or reconstruction code.

#![allow(dead_code)]

use nalgebra::DMatrix;

/// Tridiagonal matrix with `a` on the diagonal, `rho` above, ones below.
pub fn chain_matrix(a: &[f64], rho: &[f64]) -> DMatrix<f64> {
    let n = a.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = a[i];
        if i + 1 < n {
            m[(i, i + 1)] = rho[i];
            m[(i + 1, i)] = 1.0;
        }
    }
    m
}

pub fn det_minus(m: &DMatrix<f64>, e: f64) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 1.0;
    }
    (m - DMatrix::identity(n, n) * e).determinant()
}

/// `G(E) = det(S - E) / det(S_trailing - E)`.
pub fn dense_g(a: &[f64], rho: &[f64], e: f64) -> f64 {
    let full = chain_matrix(a, rho);
    let tail = chain_matrix(&a[1..], if rho.is_empty() { &[] } else { &rho[1..] });
    det_minus(&full, e) / det_minus(&tail, e)
}

/// Ascending coefficients of `det(A - E I)` by Faddeev-LeVerrier.
pub fn det_shifted_coeffs(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    // c[j] are coefficients of det(lambda I - A), descending: c[0] = 1
    let mut c = vec![1.0];
    let mut mk = DMatrix::<f64>::zeros(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    for k in 1..=n {
        mk = a * &mk + &id * c[k - 1];
        let ck = -(a * &mk).trace() / k as f64;
        c.push(ck);
    }
    // det(lambda I - A) = sum_k c[k] lambda^(n-k); det(A - E) = (-1)^n det(E - A)
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    (0..=n).map(|j| sign * c[n - j]).collect()
}

pub fn eig_re(m: &DMatrix<f64>) -> Vec<nalgebra::Complex<f64>> {
    m.clone().complex_eigenvalues().iter().copied().collect()
}

pub fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(1.0)
}
