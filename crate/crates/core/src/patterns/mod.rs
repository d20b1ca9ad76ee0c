//! Miniversal deformation patterns of canonical matrices for congruence.
//!
//! For `A_can = A_1 ⊕ … ⊕ A_t` the pattern `𝒟` is partitioned conformally.
//! Diagonal blocks `𝒟_ii` depend on `A_i` alone and each pair `i < j`
//! contributes `(𝒟_ji, 𝒟_ij)`, where `𝒟_ji` has the rows of `A_j` and the
//! columns of `A_i`. The number of stars is the codimension of the
//! congruence class of `A_can`.

mod shapes;
mod star;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use shapes::{primitive_shape, Corner, Line, LineForm, Shape, ShapeOptions, UpDownForm};
pub use star::StarPattern;

use crate::canonical::{BlockKind, CanonicalBlock, CanonicalStructure, LambdaMatch};
use crate::matcore::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternError {
    #[error("star ({}, {}) outside a {rows}x{cols} pattern", .pos.0, .pos.1)]
    OutOfBounds {
        pos: (usize, usize),
        rows: usize,
        cols: usize,
    },
    #[error("last-row tail shape needs m <= n, got {m}x{n}")]
    TailNeedsWide { m: usize, n: usize },
}

/// Shape orientation choices and the λ comparison mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PatternOptions {
    pub shapes: ShapeOptions,
    #[serde(skip)]
    pub lambda: LambdaMatch,
}

fn corner(c: Corner, l: Line, m: usize, n: usize, opts: &PatternOptions) -> StarPattern {
    primitive_shape(Shape::Corner(c, l), m, n, opts.shapes).expect("corner shapes never fail")
}

/// A `2r × 2c` pattern assembled from a 2×2 grid of `r × c` cells.
fn grid2(r: usize, c: usize, cells: [[Option<StarPattern>; 2]; 2]) -> StarPattern {
    let mut p = StarPattern::empty(2 * r, 2 * c);
    for (gi, row) in cells.iter().enumerate() {
        for (gj, cell) in row.iter().enumerate() {
            if let Some(cell) = cell {
                p.embed(cell, gi * r, gj * c);
            }
        }
    }
    p
}

fn lambda_of(b: &CanonicalBlock) -> C64 {
    b.lambda().expect("H blocks carry lambda")
}

/// Pattern of a diagonal block `𝒟(A_i)`.
pub fn diagonal_pattern(block: &CanonicalBlock, opts: &PatternOptions) -> StarPattern {
    let m = block.size();
    match block.kind() {
        BlockKind::H => {
            let lam = lambda_of(block);
            let sw = Some(corner(Corner::SW, Line::Arrow, m, m, opts));
            // λ = 1 needs m even and λ = −1 needs m odd; otherwise the value is
            // excluded and a tolerance match falls through to the generic form.
            let ends = if opts.lambda.is_one(lam) && m % 2 == 0 {
                Some(Line::Models)
            } else if opts.lambda.is_minus_one(lam) && m % 2 == 1 {
                Some(Line::Vdash)
            } else {
                None
            };
            match ends {
                None => grid2(m, m, [[None, None], [sw, None]]),
                Some(l) => grid2(
                    m,
                    m,
                    [
                        [Some(corner(Corner::NW, l, m, m, opts)), None],
                        [sw, Some(corner(Corner::SE, l, m, m, opts))],
                    ],
                ),
            }
        }
        BlockKind::Gamma => {
            let l = if m % 2 == 0 { Line::Vdash } else { Line::Models };
            corner(Corner::NW, l, m, m, opts)
        }
        BlockKind::JordanZero => corner(Corner::SW, Line::Vdash, m, m, opts),
    }
}

fn needs_swap(first: &CanonicalBlock, second: &CanonicalBlock) -> bool {
    let rank = |b: &CanonicalBlock| match b.kind() {
        BlockKind::H => 0,
        BlockKind::Gamma => 1,
        BlockKind::JordanZero => 2,
    };
    rank(first) > rank(second)
        || (first.kind() == BlockKind::JordanZero
            && second.kind() == BlockKind::JordanZero
            && first.size() < second.size())
}

/// Off-diagonal pair `(𝒟_ji, 𝒟_ij)` for blocks `A_i = block_i`, `A_j = block_j`.
///
/// `𝒟_ji` is `dim(A_j) × dim(A_i)` and `𝒟_ij` is `dim(A_i) × dim(A_j)`. The
/// case tables are stated for `H` before `Γ` before `J`, and for `J_m, J_n`
/// with `m ≥ n`; a pair given the other way round is evaluated in that
/// order and its two blocks handed back in the caller's orientation.
pub fn offdiagonal_pattern(
    block_i: &CanonicalBlock,
    block_j: &CanonicalBlock,
    opts: &PatternOptions,
) -> (StarPattern, StarPattern) {
    if needs_swap(block_i, block_j) {
        let (lower, upper) = ordered_pair(block_j, block_i, opts);
        return (upper, lower);
    }
    ordered_pair(block_i, block_j, opts)
}

fn ordered_pair(bi: &CanonicalBlock, bj: &CanonicalBlock, opts: &PatternOptions) -> (StarPattern, StarPattern) {
    let (di, dj) = (bi.dim(), bj.dim());
    let zero_ji = StarPattern::empty(dj, di);
    let zero_ij = StarPattern::empty(di, dj);
    let (m, n) = (bi.size(), bj.size());
    let lm = &opts.lambda;
    match (bi.kind(), bj.kind()) {
        (BlockKind::H, BlockKind::H) => {
            let (lam, mu) = (lambda_of(bi), lambda_of(bj));
            // cells of 𝒟_ji are n × m
            let c = |k: Corner| Some(corner(k, Line::Arrow, n, m, opts));
            let ji = if lm.eq(lam, mu) && lm.is_pm_one(lam) {
                grid2(n, m, [[c(Corner::NW), c(Corner::NE)], [c(Corner::SW), c(Corner::SE)]])
            } else if lm.eq(lam, mu) {
                grid2(n, m, [[None, c(Corner::NE)], [c(Corner::SW), None]])
            } else if lm.reciprocal(lam, mu) {
                grid2(n, m, [[c(Corner::NW), None], [None, c(Corner::SE)]])
            } else {
                zero_ji
            };
            (ji, zero_ij)
        }
        (BlockKind::Gamma, BlockKind::Gamma) => {
            if (m + n) % 2 == 0 {
                (corner(Corner::NW, Line::Arrow, n, m, opts), zero_ij)
            } else {
                (zero_ji, zero_ij)
            }
        }
        (BlockKind::JordanZero, BlockKind::JordanZero) => {
            // m ≥ n here
            let mut ji = corner(Corner::SW, Line::Vdash, n, m, opts);
            if n % 2 == 1 {
                let tail = primitive_shape(Shape::LastRowTail, n, m, opts.shapes).expect("n <= m");
                ji = ji.union(&tail);
            }
            (ji, corner(Corner::SW, Line::Vdash, m, n, opts))
        }
        (BlockKind::H, BlockKind::Gamma) => {
            let target = C64::new(if n % 2 == 1 { 1.0 } else { -1.0 }, 0.0);
            if lm.eq(lambda_of(bi), target) {
                let mut ji = StarPattern::empty(n, 2 * m);
                ji.embed(&corner(Corner::NW, Line::Arrow, n, m, opts), 0, 0);
                ji.embed(&corner(Corner::NE, Line::Arrow, n, m, opts), 0, m);
                (ji, zero_ij)
            } else {
                (zero_ji, zero_ij)
            }
        }
        (BlockKind::H, BlockKind::JordanZero) | (BlockKind::Gamma, BlockKind::JordanZero) => {
            if n % 2 == 1 {
                let ji = primitive_shape(Shape::UpDown, dj, di, opts.shapes).expect("updown never fails");
                (ji, zero_ij)
            } else {
                (zero_ji, zero_ij)
            }
        }
        _ => unreachable!("pairs are evaluated in canonical type order"),
    }
}

/// The full pattern `𝒟` of `A_can`, blocks embedded at their offsets.
pub fn full_pattern(structure: &CanonicalStructure, opts: &PatternOptions) -> StarPattern {
    let n = structure.total_dim();
    let blocks = structure.blocks();
    let offs = structure.offsets();
    let mut p = StarPattern::empty(n, n);
    for (i, bi) in blocks.iter().enumerate() {
        p.embed(&diagonal_pattern(bi, opts), offs[i], offs[i]);
        for (j, bj) in blocks.iter().enumerate().skip(i + 1) {
            let (ji, ij) = offdiagonal_pattern(bi, bj, opts);
            p.embed(&ji, offs[j], offs[i]);
            p.embed(&ij, offs[i], offs[j]);
        }
    }
    p
}

/// Codimension of the congruence class: the star count of the full pattern.
pub fn codimension(structure: &CanonicalStructure) -> usize {
    full_pattern(structure, &PatternOptions::default()).len()
}

/// Warnings for λ values within `near` of a case boundary they do not match
/// exactly under `matcher`; the pattern case split is exact, floating point
/// input may not be.
pub fn lambda_warnings(structure: &CanonicalStructure, matcher: LambdaMatch, near: f64) -> Vec<String> {
    let close = |a: C64, b: C64| a != b && (a - b).norm() <= near && !matcher.eq(a, b);
    let one = C64::new(1.0, 0.0);
    let mut out = Vec::new();
    let blocks = structure.blocks();
    for (i, bi) in blocks.iter().enumerate() {
        let Some(lam) = bi.lambda() else { continue };
        for (what, target) in [("1", one), ("-1", -one), ("0", C64::new(0.0, 0.0))] {
            if close(lam, target) {
                out.push(format!("block {i} ({bi}): lambda is within {near:e} of {what}"));
            }
        }
        for (j, bj) in blocks.iter().enumerate().skip(i + 1) {
            if let Some(mu) = bj.lambda() {
                if close(lam, mu) {
                    out.push(format!("blocks {i},{j}: lambda values nearly equal"));
                }
                if close(lam * mu, one) && !matcher.reciprocal(lam, mu) {
                    out.push(format!("blocks {i},{j}: lambda values nearly reciprocal"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> PatternOptions {
        PatternOptions::default()
    }

    fn stars(p: &StarPattern) -> Vec<(usize, usize)> {
        p.iter().collect()
    }

    fn h(m: usize, re: f64) -> CanonicalBlock {
        CanonicalBlock::h(m, C64::new(re, 0.0)).unwrap()
    }

    fn g(n: usize) -> CanonicalBlock {
        CanonicalBlock::gamma(n).unwrap()
    }

    fn j(k: usize) -> CanonicalBlock {
        CanonicalBlock::jordan_zero(k).unwrap()
    }

    #[test]
    fn diagonal_examples() {
        assert_eq!(stars(&diagonal_pattern(&g(2), &opts())), vec![(1, 1)]);
        assert_eq!(stars(&diagonal_pattern(&h(1, 3.0), &opts())), vec![(2, 1)]);
        assert_eq!(stars(&diagonal_pattern(&g(3), &opts())), vec![(2, 1)]);
        assert_eq!(stars(&diagonal_pattern(&g(1), &opts())), vec![]);
        assert_eq!(stars(&diagonal_pattern(&j(1), &opts())), vec![(1, 1)]);
        assert_eq!(stars(&diagonal_pattern(&h(1, -1.0), &opts())), vec![(1, 1), (2, 1), (2, 2)]);
        // H_2(1): models at NW and SE, full SW line
        assert_eq!(
            stars(&diagonal_pattern(&h(2, 1.0), &opts())),
            vec![(2, 1), (3, 4), (4, 1), (4, 2)]
        );
    }

    #[test]
    fn offdiagonal_examples() {
        let (ji, ij) = offdiagonal_pattern(&g(1), &g(1), &opts());
        assert_eq!((stars(&ji), stars(&ij)), (vec![(1, 1)], vec![]));
        let (ji, ij) = offdiagonal_pattern(&h(1, 0.25), &g(1), &opts());
        assert!(ji.is_empty() && ij.is_empty());
        let (ji, ij) = offdiagonal_pattern(&h(1, -1.0), &g(2), &opts());
        assert_eq!(ji.shape(), (2, 2));
        assert_eq!(stars(&ji), vec![(1, 1), (1, 2)]);
        assert!(ij.is_empty());
        let (ji, ij) = offdiagonal_pattern(&j(2), &j(1), &opts());
        assert_eq!((stars(&ji), stars(&ij)), (vec![(1, 1)], vec![(2, 1)]));
        // tail shows up once m ≥ n + 2
        let (ji, _) = offdiagonal_pattern(&j(4), &j(1), &opts());
        assert_eq!(stars(&ji), vec![(1, 1), (1, 3), (1, 4)]);
    }

    #[test]
    fn swapped_pair_matches_canonical_order() {
        let (ji, ij) = offdiagonal_pattern(&j(1), &j(2), &opts());
        let (ji2, ij2) = offdiagonal_pattern(&j(2), &j(1), &opts());
        assert_eq!((ji, ij), (ij2, ji2));
        let (ji, ij) = offdiagonal_pattern(&j(1), &g(1), &opts());
        assert_eq!(stars(&ij), vec![(1, 1)]);
        assert!(ji.is_empty());
    }

    #[test]
    fn full_pattern_examples() {
        let s = CanonicalStructure::parse_inline("J1 J1").unwrap();
        assert_eq!(full_pattern(&s, &opts()), StarPattern::full(2, 2));
        let s = CanonicalStructure::parse_inline("G1 G1 G1").unwrap();
        assert_eq!(stars(&full_pattern(&s, &opts())), vec![(2, 1), (3, 1), (3, 2)]);
        let s = CanonicalStructure::parse_inline("H1(2,0) J1").unwrap();
        assert_eq!(stars(&full_pattern(&s, &opts())), vec![(2, 1), (3, 1), (3, 2), (3, 3)]);
        let s = CanonicalStructure::parse_inline("J2 J1").unwrap();
        assert_eq!(stars(&full_pattern(&s, &opts())), vec![(2, 1), (2, 3), (3, 1), (3, 3)]);
    }

    #[test]
    fn codimension_examples() {
        assert_eq!(codimension(&CanonicalStructure::parse_inline("G1").unwrap()), 0);
        assert_eq!(codimension(&CanonicalStructure::parse_inline("J1").unwrap()), 1);
        assert_eq!(codimension(&CanonicalStructure::parse_inline("J2 J1").unwrap()), 4);
    }

    #[test]
    fn full_pattern_restricts_to_diagonal_blocks() {
        let s = CanonicalStructure::parse_inline("H2(1,0) H1(-1,0) G3 G2 J3 J3 J2").unwrap();
        let p = full_pattern(&s, &opts());
        for (b, off) in s.blocks().iter().zip(s.offsets()) {
            assert_eq!(p.restrict(off, off, b.dim(), b.dim()), diagonal_pattern(b, &opts()));
        }
    }

    #[test]
    fn near_collision_warnings() {
        let s = CanonicalStructure::parse_inline("H1(2,0) H1(0.5000000001,0) H2(1.000000001,0)").unwrap();
        let w = lambda_warnings(&s, LambdaMatch::EXACT, 1e-8);
        assert!(w.iter().any(|m| m.contains("reciprocal")));
        assert!(w.iter().any(|m| m.contains("of 1")));
        let s = CanonicalStructure::parse_inline("H1(2,0) H1(0.5,0)").unwrap();
        assert!(lambda_warnings(&s, LambdaMatch::EXACT, 1e-8).is_empty());
    }
}
