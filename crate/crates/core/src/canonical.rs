//! Canonical blocks for congruence and their direct sums.
//!
//! Every square complex matrix is congruent to a direct sum of blocks
//! `H_m(λ) = [0 I_m; J_m(λ) 0]` (λ ≠ 0, λ ≠ (−1)^{m+1}), `Γ_n` and `J_k(0)`.
//! A [`CanonicalStructure`] is such a sum in a fixed order: all `H` blocks,
//! then all `Γ` blocks, then the `J_k(0)` blocks with non-increasing `k`.
//! The order inside the `H` and `Γ` groups is the order the caller gave.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{complex_serde, ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CanonicalError {
    #[error("{block}: block size must be at least 1")]
    ZeroSize { block: &'static str },
    #[error("H_{m}({lambda}): lambda must be nonzero")]
    ZeroLambda { m: usize, lambda: C64 },
    #[error("H_{m}({lambda}): lambda must differ from (-1)^(m+1) = {excluded}")]
    ExcludedLambda { m: usize, lambda: C64, excluded: i32 },
    #[error("H_{m}: lambda is not finite")]
    NonFiniteLambda { m: usize },
    #[error("structure has no blocks")]
    Empty,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid structure description: {0}")]
    Syntax(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BlockKind {
    H,
    Gamma,
    JordanZero,
}

/// One validated canonical summand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockDescriptor", into = "BlockDescriptor")]
pub struct CanonicalBlock {
    kind: BlockKind,
    size: usize,
    lambda: Option<C64>,
}

/// JSON shape of a block: `{"kind":"H","m":2,"lambda":{"re":..,"im":..}}`,
/// `{"kind":"Gamma","n":3}` or `{"kind":"J0","k":2}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
enum BlockDescriptor {
    H {
        m: usize,
        #[serde(with = "complex_serde")]
        lambda: C64,
    },
    Gamma {
        n: usize,
    },
    J0 {
        k: usize,
    },
}

impl TryFrom<BlockDescriptor> for CanonicalBlock {
    type Error = CanonicalError;

    fn try_from(d: BlockDescriptor) -> Result<Self, Self::Error> {
        match d {
            BlockDescriptor::H { m, lambda } => Self::h(m, lambda),
            BlockDescriptor::Gamma { n } => Self::gamma(n),
            BlockDescriptor::J0 { k } => Self::jordan_zero(k),
        }
    }
}

impl From<CanonicalBlock> for BlockDescriptor {
    fn from(b: CanonicalBlock) -> Self {
        match b.kind {
            BlockKind::H => BlockDescriptor::H {
                m: b.size,
                lambda: b.lambda.unwrap_or_default(),
            },
            BlockKind::Gamma => BlockDescriptor::Gamma { n: b.size },
            BlockKind::JordanZero => BlockDescriptor::J0 { k: b.size },
        }
    }
}

/// `(−1)^{m+1}`
pub fn excluded_h_lambda(m: usize) -> i32 {
    if m % 2 == 1 {
        1
    } else {
        -1
    }
}

impl CanonicalBlock {
    pub fn h(m: usize, lambda: C64) -> Result<Self, CanonicalError> {
        if m == 0 {
            return Err(CanonicalError::ZeroSize { block: "H" });
        }
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(CanonicalError::NonFiniteLambda { m });
        }
        if lambda == C64::new(0.0, 0.0) {
            return Err(CanonicalError::ZeroLambda { m, lambda });
        }
        let excluded = excluded_h_lambda(m);
        if lambda == C64::new(excluded as f64, 0.0) {
            return Err(CanonicalError::ExcludedLambda { m, lambda, excluded });
        }
        Ok(Self {
            kind: BlockKind::H,
            size: m,
            lambda: Some(lambda),
        })
    }

    pub fn gamma(n: usize) -> Result<Self, CanonicalError> {
        if n == 0 {
            return Err(CanonicalError::ZeroSize { block: "Gamma" });
        }
        Ok(Self {
            kind: BlockKind::Gamma,
            size: n,
            lambda: None,
        })
    }

    pub fn jordan_zero(k: usize) -> Result<Self, CanonicalError> {
        if k == 0 {
            return Err(CanonicalError::ZeroSize { block: "J0" });
        }
        Ok(Self {
            kind: BlockKind::JordanZero,
            size: k,
            lambda: None,
        })
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    /// `m` for `H_m`, `n` for `Γ_n`, `k` for `J_k(0)`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn lambda(&self) -> Option<C64> {
        self.lambda
    }

    /// Number of rows of the block matrix (`2m` for `H_m`).
    pub fn dim(&self) -> usize {
        match self.kind {
            BlockKind::H => 2 * self.size,
            _ => self.size,
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        match self.kind {
            BlockKind::H => h_block_unchecked(self.size, self.lambda.unwrap_or_default()),
            BlockKind::Gamma => gamma_block(self.size),
            BlockKind::JordanZero => jordan_block(self.size, C64::new(0.0, 0.0)),
        }
    }
}

fn format_lambda(z: C64) -> String {
    format!("{:?},{:?}", z.re, z.im)
}

/// Inline syntax: `H<m>(<re>,<im>)`, `G<n>`, `J<k>`.
impl fmt::Display for CanonicalBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BlockKind::H => write!(f, "H{}({})", self.size, format_lambda(self.lambda.unwrap_or_default())),
            BlockKind::Gamma => write!(f, "G{}", self.size),
            BlockKind::JordanZero => write!(f, "J{}", self.size),
        }
    }
}

impl FromStr for CanonicalBlock {
    type Err = CanonicalError;

    fn from_str(tok: &str) -> Result<Self, Self::Err> {
        let syntax = || CanonicalError::Syntax(format!("bad block `{tok}`"));
        let tag = tok.chars().next().ok_or_else(syntax)?;
        let rest = &tok[tag.len_utf8()..];
        let digits_end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let size: usize = rest[..digits_end].parse().map_err(|_| syntax())?;
        let tail = &rest[digits_end..];
        match tag {
            'H' => {
                let inner = tail
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(syntax)?;
                let (re, im) = inner.split_once(',').unwrap_or((inner, "0"));
                let re: f64 = re.trim().parse().map_err(|_| syntax())?;
                let im: f64 = im.trim().parse().map_err(|_| syntax())?;
                Self::h(size, C64::new(re, im))
            }
            'G' if tail.is_empty() => Self::gamma(size),
            'J' if tail.is_empty() || tail == "(0)" => Self::jordan_zero(size),
            _ => Err(syntax()),
        }
    }
}

fn kind_rank(b: &CanonicalBlock) -> (u8, std::cmp::Reverse<usize>) {
    match b.kind {
        BlockKind::H => (0, std::cmp::Reverse(0)),
        BlockKind::Gamma => (1, std::cmp::Reverse(0)),
        BlockKind::JordanZero => (2, std::cmp::Reverse(b.size)),
    }
}

/// An ordered direct sum of canonical blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStructure", into = "RawStructure")]
pub struct CanonicalStructure {
    blocks: Vec<CanonicalBlock>,
    /// `permutation[p]` is the caller's index of the block now at position `p`.
    permutation: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawStructure {
    blocks: Vec<CanonicalBlock>,
}

impl TryFrom<RawStructure> for CanonicalStructure {
    type Error = CanonicalError;

    fn try_from(raw: RawStructure) -> Result<Self, Self::Error> {
        Self::new(raw.blocks)
    }
}

impl From<CanonicalStructure> for RawStructure {
    fn from(s: CanonicalStructure) -> Self {
        RawStructure { blocks: s.blocks }
    }
}

impl CanonicalStructure {
    /// Reorders the blocks into canonical order (stable) and records the
    /// permutation.
    pub fn new(blocks: Vec<CanonicalBlock>) -> Result<Self, CanonicalError> {
        if blocks.is_empty() {
            return Err(CanonicalError::Empty);
        }
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&i| kind_rank(&blocks[i]));
        Ok(Self {
            blocks: order.iter().map(|&i| blocks[i]).collect(),
            permutation: order,
        })
    }

    pub fn blocks(&self) -> &[CanonicalBlock] {
        &self.blocks
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(CanonicalBlock::dim).sum()
    }

    /// Row/column offset (0-based) of each block.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let off = *acc;
                *acc += b.dim();
                Some(off)
            })
            .collect()
    }

    /// The block-diagonal matrix `A_can`.
    pub fn assemble(&self) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(self.total_dim(), self.total_dim());
        for (b, off) in self.blocks.iter().zip(self.offsets()) {
            a.set_block(off, off, &b.matrix());
        }
        a
    }

    pub fn from_json(s: &str) -> Result<Self, CanonicalError> {
        serde_json::from_str(s).map_err(|e| {
            // Validation errors surface through serde as custom messages.
            CanonicalError::Syntax(e.to_string())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("structure serializes")
    }

    /// Parses whitespace- or `;`-separated inline blocks, e.g. `H1(2,0) G1 J2`.
    pub fn parse_inline(s: &str) -> Result<Self, CanonicalError> {
        let blocks = s
            .split(|c: char| c.is_whitespace() || c == ';')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<CanonicalBlock>, _>>()?;
        Self::new(blocks)
    }
}

impl fmt::Display for CanonicalStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `n × n`, λ on the diagonal and 1 on the superdiagonal.
pub fn jordan_block(n: usize, lambda: C64) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `Γ_n`: `(−1)^{n−i}` (1-based `i`) at `(i, n+1−i)` on the anti-diagonal and
/// at `(i, n+2−i)` just below it, zero elsewhere. The last row starts `1 1`.
pub fn gamma_block(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        // 0-based: anti-diagonal i + j = n − 1, below it i + j = n.
        let sign = if (n - 1 - i) % 2 == 0 { 1.0 } else { -1.0 };
        if i + j == n - 1 || i + j == n {
            C64::new(sign, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn h_block_unchecked(m: usize, lambda: C64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(2 * m, 2 * m);
    h.set_block(0, m, &ComplexMatrix::identity(m));
    h.set_block(m, 0, &jordan_block(m, lambda));
    h
}

/// `H_m(λ) = [0 I_m; J_m(λ) 0]`, rejecting λ = 0 and λ = (−1)^{m+1}.
pub fn h_block(m: usize, lambda: C64) -> Result<ComplexMatrix, CanonicalError> {
    CanonicalBlock::h(m, lambda).map(|b| b.matrix())
}

/// Symmetric and skew-symmetric parts of a square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymSkewPair {
    pub sym: ComplexMatrix,
    pub skew: ComplexMatrix,
}

/// `A = (A + Aᵀ)/2 + (A − Aᵀ)/2`. The transpose identities hold exactly:
/// entries below the diagonal are mirrored from those above.
pub fn split_sym_skew(a: &ComplexMatrix) -> Result<SymSkewPair, CanonicalError> {
    if !a.is_square() {
        return Err(CanonicalError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut sym = ComplexMatrix::zeros(n, n);
    let mut skew = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        sym[(i, i)] = a[(i, i)];
        for j in i + 1..n {
            let s = (a[(i, j)] + a[(j, i)]) * 0.5;
            let k = (a[(i, j)] - a[(j, i)]) * 0.5;
            sym[(i, j)] = s;
            sym[(j, i)] = s;
            skew[(i, j)] = k;
            skew[(j, i)] = C64::new(0.0, 0.0) - k;
        }
    }
    Ok(SymSkewPair { sym, skew })
}

/// Exact or tolerance-based comparisons of eigenvalue parameters.
///
/// With `tol == 0` every test is exact equality on the given values.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LambdaMatch {
    pub tol: f64,
}

impl LambdaMatch {
    pub const EXACT: Self = Self { tol: 0.0 };

    pub fn eq(&self, a: C64, b: C64) -> bool {
        if self.tol == 0.0 {
            a == b
        } else {
            (a - b).norm() <= self.tol
        }
    }

    pub fn is_one(&self, a: C64) -> bool {
        self.eq(a, C64::new(1.0, 0.0))
    }

    pub fn is_minus_one(&self, a: C64) -> bool {
        self.eq(a, C64::new(-1.0, 0.0))
    }

    pub fn is_pm_one(&self, a: C64) -> bool {
        self.is_one(a) || self.is_minus_one(a)
    }

    /// `a = b^{-1}`; exact mode accepts `a == 1/b`, `b == 1/a` or `a·b == 1`.
    pub fn reciprocal(&self, a: C64, b: C64) -> bool {
        let one = C64::new(1.0, 0.0);
        if self.tol == 0.0 {
            a == one / b || b == one / a || a * b == one
        } else {
            (a * b - one).norm() <= self.tol
        }
    }
}
