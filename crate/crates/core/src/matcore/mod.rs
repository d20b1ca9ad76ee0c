//! Numeric substrate: dense complex matrices, norms, vectorization, rank and
//! minimum-norm linear solves.

mod decomp;
mod matrix;
pub mod text;

use thiserror::Error;

pub use decomp::{rank_of, solve_least_norm, LeastNormSolver, PivotedQr, RankReport};
pub use matrix::{norm2, vec_index, ComplexMatrix, C64};

use crate::patterns::StarPattern;

/// Default relative tolerance for rank decisions and solves.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: expected {}x{}, got {}x{}", .expected.0, .expected.1, .got.0, .got.1)]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("inconsistent system: residual {residual:e} exceeds {allowed:e}")]
    Inconsistent { residual: f64, allowed: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Frobenius norm over the entries outside the pattern's star set.
pub fn masked_norm(p: &ComplexMatrix, pattern: &StarPattern) -> Result<f64, MatrixError> {
    if p.shape() != pattern.shape() {
        return Err(MatrixError::DimensionMismatch {
            expected: pattern.shape(),
            got: p.shape(),
        });
    }
    let outside: Vec<C64> = (0..p.rows())
        .flat_map(|i| (0..p.cols()).map(move |j| (i, j)))
        .filter(|&(i, j)| !pattern.contains(i + 1, j + 1))
        .map(|(i, j)| p[(i, j)])
        .collect();
    Ok(norm2(outside.iter()))
}

/// Serde adapter writing a complex number as `{"re": .., "im": ..}`.
pub mod complex_serde {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct ReIm {
        re: f64,
        #[serde(default)]
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        ReIm { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let v = ReIm::deserialize(d)?;
        Ok(C64::new(v.re, v.im))
    }
}

/// Serde adapter embedding a matrix as a string in the text format.
pub mod matrix_text_serde {
    use super::{text, ComplexMatrix};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&text::write_matrix(m))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
        let s = String::deserialize(d)?;
        text::parse_matrix(&s).map_err(D::Error::custom)
    }
}
