#![allow(dead_code)]

use miniversal::matcore::{vec_index, ComplexMatrix, C64};
use miniversal::patterns::StarPattern;
use nalgebra::DMatrix;

pub fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Rank from singular values, relative to the largest.
pub fn svd_rank(m: &DMatrix<C64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

/// The tangent operator built entry by entry from `E_ijᵀ A + A E_ij`, using
/// dense products rather than index bookkeeping.
pub fn brute_tangent(a: &ComplexMatrix) -> DMatrix<C64> {
    let n = a.rows();
    let an = to_na(a);
    let mut op = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let mut e = DMatrix::<C64>::zeros(n, n);
            e[(i, j)] = C64::new(1.0, 0.0);
            let img = e.transpose() * &an + &an * &e;
            for c in 0..n {
                for r in 0..n {
                    op[(vec_index(r, c, n), vec_index(i, j, n))] = img[(r, c)];
                }
            }
        }
    }
    op
}

/// `[T | star units]` as a dense matrix.
pub fn brute_combined(a: &ComplexMatrix, pattern: &StarPattern) -> DMatrix<C64> {
    let n = a.rows();
    let t = brute_tangent(a);
    let mut m = DMatrix::zeros(n * n, n * n + pattern.len());
    m.columns_mut(0, n * n).copy_from(&t);
    for (k, (i, j)) in pattern.iter().enumerate() {
        m[(vec_index(i - 1, j - 1, n), n * n + k)] = C64::new(1.0, 0.0);
    }
    m
}

pub fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && (a - b).frobenius_norm() <= tol
}
