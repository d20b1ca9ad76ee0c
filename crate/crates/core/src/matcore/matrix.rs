//! Dense complex matrices.
//!
//! Storage is row-major: `data[i * cols + j]` holds entry `(i, j)` (0-based).
//! Vectorization is column stacking, so entry `(i, j)` of an `r × c` matrix
//! lands at index `j * r + i`. Every module that addresses matrix entries
//! through vectors relies on this convention.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use super::MatrixError;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Real matrix from nested rows. Panics on ragged input; intended for
    /// literals in code and tests.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn require_square(&self) -> Result<usize, MatrixError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch {
                expected: (self.cols, rhs.cols),
                got: (rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>, MatrixError> {
        if v.len() != self.cols {
            return Err(MatrixError::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self, MatrixError> {
        if self.shape() != rhs.shape() {
            return Err(MatrixError::DimensionMismatch {
                expected: self.shape(),
                got: rhs.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.zip_with(rhs, |a, b| a - b)
    }

    /// `√(Σ |p_ij|²)`, accumulated with scaling to avoid overflow.
    pub fn frobenius_norm(&self) -> f64 {
        norm2(self.data.iter())
    }

    /// Copies `block` into `self` with its top-left corner at `(row, col)`.
    pub fn set_block(&mut self, row: usize, col: usize, block: &Self) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }

    pub fn submatrix(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        assert!(row + rows <= self.rows && col + cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self[(row + i, col + j)])
    }

    /// Column-stacking vectorization.
    pub fn vectorize(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`ComplexMatrix::vectorize`].
    pub fn devectorize(v: &[C64], rows: usize, cols: usize) -> Result<Self, MatrixError> {
        if v.len() != rows * cols {
            return Err(MatrixError::LengthMismatch {
                expected: rows * cols,
                got: v.len(),
            });
        }
        let m = Self::from_fn(rows, cols, |i, j| v[j * rows + i]);
        Self::from_vec(rows, cols, m.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Index of entry `(i, j)` (0-based) of a `rows`-row matrix under column stacking.
pub fn vec_index(i: usize, j: usize, rows: usize) -> usize {
    j * rows + i
}

/// Euclidean norm of a complex sequence with overflow-safe scaling.
pub fn norm2<'a>(it: impl IntoIterator<Item = &'a C64>) -> f64 {
    let mut scale = 0.0f64;
    let mut ssq = 1.0f64;
    for z in it {
        for x in [z.re, z.im] {
            if x != 0.0 {
                let ax = x.abs();
                if scale < ax {
                    ssq = 1.0 + ssq * (scale / ax).powi(2);
                    scale = ax;
                } else {
                    ssq += (ax / scale).powi(2);
                }
            }
        }
    }
    scale * ssq.sqrt()
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch, like indexing out of bounds.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("shape mismatch in matrix addition")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("shape mismatch in matrix subtraction")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in matrix product")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(ComplexMatrix::zeros(3, 3).frobenius_norm(), 0.0);
        assert!((ComplexMatrix::identity(3).frobenius_norm() - 3f64.sqrt()).abs() < 1e-15);
        let p = ComplexMatrix::from_real_rows(&[[3.0, 4.0], [0.0, 0.0]]);
        assert_eq!(p.frobenius_norm(), 5.0);
    }

    #[test]
    fn vectorize_identity_is_column_stacked() {
        let v = ComplexMatrix::identity(2).vectorize();
        assert_eq!(v, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn devectorize_unit_vector_gives_matrix_unit() {
        let (rows, cols) = (3, 4);
        for k in 0..rows * cols {
            let mut e = vec![c(0.0, 0.0); rows * cols];
            e[k] = c(1.0, 0.0);
            let m = ComplexMatrix::devectorize(&e, rows, cols).unwrap();
            // 1-based: k+1 = (j-1)*rows + i
            let (i, j) = (k % rows, k / rows);
            assert_eq!(m[(i, j)], c(1.0, 0.0));
            assert_eq!(m.frobenius_norm(), 1.0);
            assert_eq!(vec_index(i, j, rows), k);
        }
    }

    #[test]
    fn devectorize_rejects_wrong_length() {
        let err = ComplexMatrix::devectorize(&[c(1.0, 0.0); 5], 2, 3).unwrap_err();
        assert!(matches!(err, MatrixError::LengthMismatch { expected: 6, got: 5 }));
    }

    #[test]
    fn from_vec_rejects_non_finite() {
        let err = ComplexMatrix::from_vec(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, MatrixError::NonFinite { row: 0, col: 1 }));
    }

    #[test]
    fn product_and_transpose() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 0.0)])
            .unwrap();
        let b = ComplexMatrix::identity(2);
        assert_eq!(&a * &b, a);
        assert_eq!(a.transpose()[(0, 1)], c(0.0, -1.0));
        assert_eq!(a.conj_transpose()[(0, 1)], c(0.0, 1.0));
        assert!(a.matmul(&ComplexMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn norm2_handles_extreme_scales() {
        let big = [c(1e200, 0.0), c(0.0, 1e200)];
        assert!((norm2(big.iter()) / (2f64.sqrt() * 1e200) - 1.0).abs() < 1e-15);
        let tiny = [c(3e-200, 0.0), c(4e-200, 0.0)];
        assert!((norm2(tiny.iter()) / 5e-200 - 1.0).abs() < 1e-15);
    }
}
