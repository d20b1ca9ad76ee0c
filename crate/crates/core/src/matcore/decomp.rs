//! Householder QR with column pivoting, numerical rank and minimum-norm solves.
//!
//! The least-norm solver is a complete orthogonal decomposition: a pivoted QR
//! `M P = Q R` determines the rank `r`, and a second (unpivoted) QR of the
//! leading `r` rows of `R`, conjugate-transposed, yields the minimum-norm
//! solution of the consistent part of the system.

use serde::Serialize;

use super::matrix::{norm2, ComplexMatrix, C64};
use super::MatrixError;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Reflector `H = I − 2 v v*` acting on the trailing entries `start..`.
#[derive(Clone, Debug)]
struct Reflector {
    start: usize,
    v: Vec<C64>,
}

impl Reflector {
    fn apply(&self, x: &mut [C64]) {
        let tail = &mut x[self.start..];
        let s: C64 = self.v.iter().zip(tail.iter()).map(|(v, x)| v.conj() * x).sum();
        if s == ZERO {
            return;
        }
        let s2 = s * 2.0;
        for (x, v) in tail.iter_mut().zip(&self.v) {
            *x -= v * s2;
        }
    }
}

/// Householder QR of a column-major working copy.
#[derive(Clone, Debug)]
struct Householder {
    rows: usize,
    /// Transformed columns; entries on and above the diagonal hold `R`.
    cols: Vec<Vec<C64>>,
    reflectors: Vec<Option<Reflector>>,
    perm: Vec<usize>,
}

impl Householder {
    fn factor(rows: usize, mut cols: Vec<Vec<C64>>, pivot: bool) -> Self {
        let ncols = cols.len();
        let steps = rows.min(ncols);
        let mut perm: Vec<usize> = (0..ncols).collect();
        let mut reflectors = Vec::with_capacity(steps);
        for k in 0..steps {
            if pivot {
                // Recomputed rather than downdated: sizes here are small and
                // downdating loses accuracy exactly where rank decisions happen.
                let mut best = k;
                let mut best_norm = -1.0;
                for (p, col) in cols.iter().enumerate().skip(k) {
                    let nrm = norm2(col[k..].iter());
                    if nrm > best_norm {
                        best_norm = nrm;
                        best = p;
                    }
                }
                cols.swap(k, best);
                perm.swap(k, best);
            }
            let x = &cols[k][k..];
            let nrm = norm2(x.iter());
            if nrm == 0.0 {
                reflectors.push(None);
                continue;
            }
            let x0 = x[0];
            let phase = if x0 == ZERO { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
            let alpha = -phase * nrm;
            let mut v: Vec<C64> = x.to_vec();
            v[0] -= alpha;
            let vn = norm2(v.iter());
            for z in v.iter_mut() {
                *z /= vn;
            }
            let refl = Reflector { start: k, v };
            cols[k][k] = alpha;
            for z in cols[k][k + 1..].iter_mut() {
                *z = ZERO;
            }
            for col in cols.iter_mut().skip(k + 1) {
                refl.apply(col);
            }
            reflectors.push(Some(refl));
        }
        Self {
            rows,
            cols,
            reflectors,
            perm,
        }
    }

    fn diag_magnitudes(&self) -> Vec<f64> {
        (0..self.reflectors.len()).map(|k| self.cols[k][k].norm()).collect()
    }

    /// `Q* x`
    fn apply_qh(&self, x: &mut [C64]) {
        for r in self.reflectors.iter().flatten() {
            r.apply(x);
        }
    }

    /// `Q x`
    fn apply_q(&self, x: &mut [C64]) {
        for r in self.reflectors.iter().rev().flatten() {
            r.apply(x);
        }
    }

    fn r(&self, i: usize, j: usize) -> C64 {
        if i <= j {
            self.cols[j][i]
        } else {
            ZERO
        }
    }
}

fn columns_of(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)]).collect())
        .collect()
}

fn rank_from_magnitudes(mags: &[f64], tol: f64) -> usize {
    let largest = mags.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return 0;
    }
    mags.iter().take_while(|&&d| d > tol * largest).count()
}

/// Numerical rank together with the pivot magnitudes it was decided from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub tolerance: f64,
    /// `|r_kk|` of the pivoted QR, non-increasing.
    pub magnitudes: Vec<f64>,
}

/// Pivoted QR factorization `M P = Q R`.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    inner: Householder,
}

impl PivotedQr {
    pub fn new(m: &ComplexMatrix) -> Self {
        Self {
            inner: Householder::factor(m.rows(), columns_of(m), true),
        }
    }

    /// Builds the factorization from columns directly (each of length `rows`).
    pub fn from_columns(rows: usize, cols: Vec<Vec<C64>>) -> Self {
        debug_assert!(cols.iter().all(|c| c.len() == rows));
        Self {
            inner: Householder::factor(rows, cols, true),
        }
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.inner.diag_magnitudes()
    }

    pub fn rank(&self, tol: f64) -> usize {
        rank_from_magnitudes(&self.magnitudes(), tol)
    }

    /// Column `k` of `P`: the original column index placed at position `k`.
    pub fn permutation(&self) -> &[usize] {
        &self.inner.perm
    }

    /// The first `count` columns of `Q`, an orthonormal basis of the span of
    /// the pivot columns.
    pub fn q_columns(&self, count: usize) -> Vec<Vec<C64>> {
        let m = self.inner.rows;
        (0..count.min(m))
            .map(|t| {
                let mut e = vec![ZERO; m];
                e[t] = C64::new(1.0, 0.0);
                self.inner.apply_q(&mut e);
                e
            })
            .collect()
    }
}

/// Numerical rank: the number of pivot magnitudes above `tol · (largest)`.
pub fn rank_of(p: &ComplexMatrix, tol: f64) -> RankReport {
    assert!(tol > 0.0, "rank tolerance must be positive");
    let mags = PivotedQr::new(p).magnitudes();
    RankReport {
        rank: rank_from_magnitudes(&mags, tol),
        tolerance: tol,
        magnitudes: mags,
    }
}

/// Factor-once minimum-norm solver for `M x = b`.
#[derive(Clone, Debug)]
pub struct LeastNormSolver {
    matrix: ComplexMatrix,
    qr: Householder,
    /// QR of `R[..rank, ..]*`, present when rank > 0.
    cod: Option<Householder>,
    rank: usize,
    tol: f64,
}

impl LeastNormSolver {
    pub fn new(m: &ComplexMatrix, tol: f64) -> Self {
        assert!(tol > 0.0, "solve tolerance must be positive");
        let qr = Householder::factor(m.rows(), columns_of(m), true);
        let rank = rank_from_magnitudes(&qr.diag_magnitudes(), tol);
        let n = m.cols();
        let cod = (rank > 0).then(|| {
            // Column t of R1* is the conjugate of row t of R1.
            let cols: Vec<Vec<C64>> = (0..rank)
                .map(|t| (0..n).map(|j| qr.r(t, j).conj()).collect())
                .collect();
            Householder::factor(n, cols, false)
        });
        Self {
            matrix: m.clone(),
            qr,
            cod,
            rank,
            tol,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Minimum-norm solution of the rank-truncated system; fails when the
    /// residual exceeds `tol · (1 + ‖b‖)`.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>, MatrixError> {
        let (rows, n) = self.matrix.shape();
        if b.len() != rows {
            return Err(MatrixError::LengthMismatch {
                expected: rows,
                got: b.len(),
            });
        }
        let mut y = vec![ZERO; n];
        if let Some(cod) = &self.cod {
            let mut c = b.to_vec();
            self.qr.apply_qh(&mut c);
            // T* w = c, T* lower triangular
            let mut w = vec![ZERO; self.rank];
            for t in 0..self.rank {
                let mut acc = c[t];
                for (s, ws) in w.iter().enumerate().take(t) {
                    acc -= cod.r(s, t).conj() * ws;
                }
                w[t] = acc / cod.r(t, t).conj();
            }
            y[..self.rank].copy_from_slice(&w);
            cod.apply_q(&mut y);
        }
        let mut x = vec![ZERO; n];
        for (k, &p) in self.qr.perm.iter().enumerate() {
            x[p] = y[k];
        }
        let mx = self.matrix.mul_vec(&x)?;
        let resid: Vec<C64> = mx.iter().zip(b).map(|(a, b)| a - b).collect();
        let residual = norm2(resid.iter());
        let allowed = self.tol * (1.0 + norm2(b.iter()));
        if residual > allowed {
            return Err(MatrixError::Inconsistent { residual, allowed });
        }
        Ok(x)
    }
}

/// One-shot minimum-norm solve; see [`LeastNormSolver`].
pub fn solve_least_norm(m: &ComplexMatrix, b: &[C64], tol: f64) -> Result<Vec<C64>, MatrixError> {
    LeastNormSolver::new(m, tol).solve(b)
}
