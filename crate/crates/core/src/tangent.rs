//! Tangent spaces of congruence orbits and transversality tests.
//!
//! `T(A) = {Cᵀ A + A C}` is represented by its `n² × n²` matrix in
//! column-stacked coordinates. A pattern `𝒟` is transversal to the orbit when
//! `T(A) + 𝒟(ℂ)` spans `ℂ^{n×n}`, and gives a miniversal deformation when the
//! sum is also direct. Both are decided by numerical rank.

use serde::Serialize;
use thiserror::Error;

use crate::canonical::CanonicalStructure;
use crate::matcore::{
    norm2, rank_of, vec_index, ComplexMatrix, LeastNormSolver, MatrixError, PivotedQr, C64,
};
use crate::patterns::{full_pattern, lambda_warnings, PatternOptions, StarPattern};

/// Distance to a case boundary below which λ values draw a warning.
pub const NEAR_DEGENERATE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TangentError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("pattern is {}x{}, matrix is {}x{}", .pattern.0, .pattern.1, .matrix.0, .matrix.1)]
    PatternShape {
        pattern: (usize, usize),
        matrix: (usize, usize),
    },
    #[error("tangent space and pattern are not a direct sum ({0:?})")]
    NotTransversal(Verdict),
}

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// The linear map `C ↦ Cᵀ A + A C` on `ℂ^{n×n}`.
#[derive(Clone, Debug)]
pub struct TangentOperator {
    base: ComplexMatrix,
    op: ComplexMatrix,
}

impl TangentOperator {
    pub fn new(a: &ComplexMatrix) -> Result<Self, TangentError> {
        let n = a.require_square()?;
        let nn = n * n;
        let mut op = ComplexMatrix::zeros(nn, nn);
        for i in 0..n {
            for j in 0..n {
                // E_ijᵀ A puts row i of A into row j; A E_ij puts column i of A into column j.
                let col = vec_index(i, j, n);
                for c in 0..n {
                    op[(vec_index(j, c, n), col)] += a[(i, c)];
                }
                for r in 0..n {
                    op[(vec_index(r, j, n), col)] += a[(r, i)];
                }
            }
        }
        Ok(Self { base: a.clone(), op })
    }

    pub fn base(&self) -> &ComplexMatrix {
        &self.base
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.op
    }

    /// `Cᵀ A + A C`, evaluated directly.
    pub fn apply(&self, c: &ComplexMatrix) -> ComplexMatrix {
        &(&c.transpose() * &self.base) + &(&self.base * c)
    }

    pub fn rank(&self, tol: f64) -> usize {
        rank_of(&self.op, tol).rank
    }
}

pub fn tangent_operator(a: &ComplexMatrix) -> Result<TangentOperator, TangentError> {
    TangentOperator::new(a)
}

/// The map `(S, R) ↦ (Sᵀ M + N R, Rᵀ N + M S)` for `M: m×m`, `N: n×n`,
/// `S: m×n`, `R: n×m`. Domain coordinates are `[vec S; vec R]`, codomain
/// coordinates `[vec(n×m part); vec(m×n part)]`.
#[derive(Clone, Debug)]
pub struct PairTangentOperator {
    m: usize,
    n: usize,
    op: ComplexMatrix,
}

impl PairTangentOperator {
    pub fn new(mm: &ComplexMatrix, nn: &ComplexMatrix) -> Result<Self, TangentError> {
        let m = mm.require_square()?;
        let n = nn.require_square()?;
        let dim = 2 * m * n;
        let lower = |i: usize, j: usize| vec_index(i, j, n); // n×m block
        let upper = |i: usize, j: usize| m * n + vec_index(i, j, m); // m×n block
        let mut op = ComplexMatrix::zeros(dim, dim);
        for p in 0..m {
            for q in 0..n {
                // S = E_pq (m×n): Sᵀ M puts row p of M into row q; M S puts column p into column q.
                let col = vec_index(p, q, m);
                for c in 0..m {
                    op[(lower(q, c), col)] += mm[(p, c)];
                }
                for r in 0..m {
                    op[(upper(r, q), col)] += mm[(r, p)];
                }
            }
        }
        for p in 0..n {
            for q in 0..m {
                // R = E_pq (n×m): N R puts column p of N into column q; Rᵀ N puts row p into row q.
                let col = m * n + vec_index(p, q, n);
                for r in 0..n {
                    op[(lower(r, q), col)] += nn[(r, p)];
                }
                for c in 0..n {
                    op[(upper(q, c), col)] += nn[(p, c)];
                }
            }
        }
        Ok(Self { m, n, op })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.op
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }
}

pub fn pair_tangent_operator(mm: &ComplexMatrix, nn: &ComplexMatrix) -> Result<PairTangentOperator, TangentError> {
    PairTangentOperator::new(mm, nn)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    DirectSum,
    SumNotDirect,
    NotSpanning,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransversalityReport {
    /// Matrix size (`m + n` for a pair of blocks).
    pub n: usize,
    /// Dimension of the ambient space (`n²`, or `2mn` for a pair).
    pub ambient_dim: usize,
    pub tangent_rank: usize,
    pub pattern_stars: usize,
    pub combined_rank: usize,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl TransversalityReport {
    pub fn is_direct_sum(&self) -> bool {
        self.verdict == Verdict::DirectSum
    }

    pub fn codimension(&self) -> usize {
        self.ambient_dim - self.tangent_rank
    }
}

fn classify(ambient: usize, tangent_rank: usize, stars: usize, combined: usize) -> Verdict {
    if combined < ambient {
        Verdict::NotSpanning
    } else if tangent_rank + stars == ambient {
        Verdict::DirectSum
    } else {
        Verdict::SumNotDirect
    }
}

fn columns(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.cols()).map(|j| (0..m.rows()).map(|i| m[(i, j)]).collect()).collect()
}

fn unit(len: usize, k: usize) -> Vec<C64> {
    let mut e = vec![C64::new(0.0, 0.0); len];
    e[k] = ONE;
    e
}

fn report_from(op: &ComplexMatrix, star_coords: &[usize], n: usize, tol: f64) -> TransversalityReport {
    let ambient = op.rows();
    let tangent_rank = rank_of(op, tol).rank;
    let mut cols = columns(op);
    cols.extend(star_coords.iter().map(|&k| unit(ambient, k)));
    let combined_rank = PivotedQr::from_columns(ambient, cols).rank(tol);
    TransversalityReport {
        n,
        ambient_dim: ambient,
        tangent_rank,
        pattern_stars: star_coords.len(),
        combined_rank,
        verdict: classify(ambient, tangent_rank, star_coords.len(), combined_rank),
        warnings: Vec::new(),
    }
}

fn check_shape(a: &ComplexMatrix, pattern: &StarPattern) -> Result<usize, TangentError> {
    let n = a.require_square()?;
    if pattern.shape() != (n, n) {
        return Err(TangentError::PatternShape {
            pattern: pattern.shape(),
            matrix: a.shape(),
        });
    }
    Ok(n)
}

fn pattern_coords(pattern: &StarPattern) -> Vec<usize> {
    pattern.iter().map(|(i, j)| vec_index(i - 1, j - 1, pattern.rows())).collect()
}

/// Decides whether `ℂ^{n×n} = T(A) ⊕ 𝒟(ℂ)`.
pub fn check_transversality(
    a: &ComplexMatrix,
    pattern: &StarPattern,
    tol: f64,
) -> Result<TransversalityReport, TangentError> {
    let n = check_shape(a, pattern)?;
    let t = TangentOperator::new(a)?;
    Ok(report_from(t.matrix(), &pattern_coords(pattern), n, tol))
}

/// Transversality of the full pattern of a structure, with warnings for
/// λ values close to a case boundary.
pub fn verify_structure(
    structure: &CanonicalStructure,
    opts: &PatternOptions,
    tol: f64,
) -> Result<TransversalityReport, TangentError> {
    let a = structure.assemble();
    let mut rep = check_transversality(&a, &full_pattern(structure, opts), tol)?;
    rep.warnings = lambda_warnings(structure, opts.lambda, NEAR_DEGENERATE);
    Ok(rep)
}

/// Blockwise analogue on `ℂ^{n×m} ⊕ ℂ^{m×n}` for a pair of diagonal blocks.
pub fn check_pair_transversality(
    mm: &ComplexMatrix,
    nn: &ComplexMatrix,
    pattern_ji: &StarPattern,
    pattern_ij: &StarPattern,
    tol: f64,
) -> Result<TransversalityReport, TangentError> {
    let op = PairTangentOperator::new(mm, nn)?;
    let (m, n) = op.dims();
    if pattern_ji.shape() != (n, m) {
        return Err(TangentError::PatternShape {
            pattern: pattern_ji.shape(),
            matrix: (n, m),
        });
    }
    if pattern_ij.shape() != (m, n) {
        return Err(TangentError::PatternShape {
            pattern: pattern_ij.shape(),
            matrix: (m, n),
        });
    }
    let mut coords: Vec<usize> = pattern_ji.iter().map(|(i, j)| vec_index(i - 1, j - 1, n)).collect();
    coords.extend(pattern_ij.iter().map(|(i, j)| m * n + vec_index(i - 1, j - 1, m)));
    Ok(report_from(op.matrix(), &coords, m + n, tol))
}

/// The unique `D ∈ 𝒟(ℂ)` with `D = C + Xᵀ A + A X`, and the least-norm `X`.
pub fn project_onto_pattern(
    a: &ComplexMatrix,
    pattern: &StarPattern,
    c: &ComplexMatrix,
    tol: f64,
) -> Result<(ComplexMatrix, ComplexMatrix), TangentError> {
    let n = check_shape(a, pattern)?;
    if c.shape() != (n, n) {
        return Err(MatrixError::DimensionMismatch {
            expected: (n, n),
            got: c.shape(),
        }
        .into());
    }
    let rep = check_transversality(a, pattern, tol)?;
    if !rep.is_direct_sum() {
        return Err(TangentError::NotTransversal(rep.verdict));
    }
    let t = TangentOperator::new(a)?;
    let (k, off) = off_pattern_rows(&t, pattern);
    let rhs: Vec<C64> = off.iter().map(|&(i, j)| -c[(i, j)]).collect();
    let x = LeastNormSolver::new(&k, tol).solve(&rhs)?;
    let x = ComplexMatrix::devectorize(&x, n, n)?;
    let mut d = c + &t.apply(&x);
    for &(i, j) in &off {
        d[(i, j)] = C64::new(0.0, 0.0);
    }
    Ok((d, x))
}

/// Rows of the tangent operator at positions outside the pattern, and those
/// positions (0-based) in column-stacked order.
pub(crate) fn off_pattern_rows(t: &TangentOperator, pattern: &StarPattern) -> (ComplexMatrix, Vec<(usize, usize)>) {
    let n = pattern.rows();
    let off: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .filter(|&(i, j)| !pattern.contains(i + 1, j + 1))
        .collect();
    let op = t.matrix();
    let k = ComplexMatrix::from_fn(off.len(), op.cols(), |r, col| {
        let (i, j) = off[r];
        op[(vec_index(i, j, n), col)]
    });
    (k, off)
}

/// Completes a basis of `T(A)` by matrix units scanned in row-major order
/// `(1,1), (1,2), …, (n,n)`, keeping each unit that enlarges the span.
pub fn greedy_miniversal(a: &ComplexMatrix, tol: f64) -> Result<StarPattern, TangentError> {
    let n = a.require_square()?;
    let nn = n * n;
    let t = TangentOperator::new(a)?;
    let qr = PivotedQr::new(t.matrix());
    let mut basis = qr.q_columns(qr.rank(tol));
    let mut kept = StarPattern::empty(n, n);
    for i in 0..n {
        for j in 0..n {
            if basis.len() == nn {
                return Ok(kept);
            }
            let mut v = unit(nn, vec_index(i, j, n));
            // two passes of Gram-Schmidt keep the residual at rounding level
            for _ in 0..2 {
                for q in &basis {
                    let d: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (x, y) in v.iter_mut().zip(q) {
                        *x -= d * y;
                    }
                }
            }
            let r = norm2(v.iter());
            if r > tol {
                for x in v.iter_mut() {
                    *x /= r;
                }
                basis.push(v);
                kept.insert(i + 1, j + 1).expect("in bounds");
            }
        }
    }
    Ok(kept)
}
