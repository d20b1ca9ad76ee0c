//! The miniversal forms of all `2 × 2` and `3 × 3` matrices.
//!
//! Each form is regenerated from the pattern engine and printed as
//! `A_can + 𝒟` side by side; free eigenvalue parameters are shown by name.

use crate::canonical::{BlockKind, CanonicalStructure};
use crate::matcore::{ComplexMatrix, C64};
use crate::patterns::{full_pattern, PatternOptions, StarPattern};

/// The expected rendering of [`small_forms`], written out by hand.
pub const SMALL_FORMS_FIXTURE: &str = include_str!("../fixtures/small_forms.txt");

#[derive(Clone, Debug)]
pub struct CatalogForm {
    pub structure: CanonicalStructure,
    /// Name shown in place of the `λ` of the (single) `H` block.
    pub symbol: Option<&'static str>,
    pub condition: Option<&'static str>,
}

const TWO: &[(&str, Option<&str>, Option<&str>)] = &[
    ("J1 J1", None, None),
    ("G1 J1", None, None),
    ("G1 G1", None, None),
    ("H1(-1,0)", None, None),
    ("H1(2,0)", Some("λ"), Some("λ ≠ ±1")),
    ("G2", None, None),
];

const THREE: &[(&str, Option<&str>, Option<&str>)] = &[
    ("J1 J1 J1", None, None),
    ("G1 J1 J1", None, None),
    ("G1 G1 J1", None, None),
    ("G1 G1 G1", None, None),
    ("H1(-1,0) J1", None, None),
    ("H1(2,0) J1", Some("λ"), Some("λ ≠ 0, ±1")),
    ("J2 J1", None, None),
    ("G2 J1", None, None),
    ("H1(-1,0) G1", None, None),
    ("H1(2,0) G1", Some("μ"), Some("μ ≠ ±1")),
    ("G2 G1", None, None),
    ("J3", None, None),
    ("G3", None, None),
];

fn forms(table: &[(&str, Option<&'static str>, Option<&'static str>)]) -> Vec<CatalogForm> {
    table
        .iter()
        .map(|&(s, symbol, condition)| CatalogForm {
            structure: CanonicalStructure::parse_inline(s).expect("catalog entries are valid"),
            symbol,
            condition,
        })
        .collect()
}

/// The `2 × 2` forms followed by the `3 × 3` forms.
pub fn small_forms() -> (Vec<CatalogForm>, Vec<CatalogForm>) {
    (forms(TWO), forms(THREE))
}

/// An exact entry: integers without a fractional part, `-0` as `0`.
pub fn format_entry(z: C64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    if z.im == 0.0 {
        format!("{re}")
    } else if re == 0.0 {
        format!("{}i", z.im)
    } else {
        format!("{re}{:+}i", z.im)
    }
}

pub fn entry_grid(m: &ComplexMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| format_entry(m[(i, j)])).collect())
        .collect()
}

fn aligned_rows(grid: &[Vec<String>]) -> Vec<String> {
    let cols = grid.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols)
        .map(|j| grid.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
        .collect();
    grid.iter()
        .map(|r| {
            r.iter()
                .zip(&widths)
                .map(|(s, &w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// `A + 𝒟` with the two grids side by side.
pub fn render_side_by_side(entries: &[Vec<String>], pattern: &StarPattern) -> String {
    let left = aligned_rows(entries);
    let width = left.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let right: Vec<String> = pattern.render().lines().map(str::to_string).collect();
    let mut out = String::new();
    for (i, (l, r)) in left.iter().zip(&right).enumerate() {
        let sep = if i == 0 { "  +  " } else { "     " };
        out.push_str(&format!("{l:<width$}{sep}{r}\n"));
    }
    out
}

impl CatalogForm {
    pub fn title(&self) -> String {
        let blocks: Vec<String> = self
            .structure
            .blocks()
            .iter()
            .map(|b| match (b.kind(), self.symbol) {
                (BlockKind::H, Some(sym)) => format!("H{}({sym})", b.size()),
                (BlockKind::H, None) => format!("H{}({})", b.size(), format_entry(b.lambda().unwrap())),
                (BlockKind::Gamma, _) => format!("G{}", b.size()),
                (BlockKind::JordanZero, _) => format!("J{}", b.size()),
            })
            .collect();
        match self.condition {
            Some(c) => format!("{}  ({c})", blocks.join(" ")),
            None => blocks.join(" "),
        }
    }

    /// Entries of `A_can`, with the named parameter in place of its value.
    pub fn entries(&self) -> Vec<Vec<String>> {
        let mut grid = entry_grid(&self.structure.assemble());
        if let Some(sym) = self.symbol {
            let offs = self.structure.offsets();
            for (b, &o) in self.structure.blocks().iter().zip(&offs) {
                if b.kind() == BlockKind::H {
                    let m = b.size();
                    for t in 0..m {
                        grid[o + m + t][o + t] = sym.to_string();
                    }
                }
            }
        }
        grid
    }

    pub fn render(&self, opts: &PatternOptions) -> String {
        format!(
            "{}\n{}",
            self.title(),
            render_side_by_side(&self.entries(), &full_pattern(&self.structure, opts))
        )
    }
}

/// All small forms, regenerated from the pattern engine.
pub fn render_small_forms() -> String {
    let opts = PatternOptions::default();
    let (two, three) = small_forms();
    let mut out = String::new();
    for (heading, list) in [("2x2", &two), ("3x3", &three)] {
        out.push_str(&format!("# {heading}\n\n"));
        for f in list.iter() {
            out.push_str(&f.render(&opts));
            out.push('\n');
        }
    }
    out
}

/// Line-by-line differences between the regenerated table and the fixture.
pub fn diff_against_fixture() -> Vec<String> {
    let got = render_small_forms();
    let want: Vec<&str> = SMALL_FORMS_FIXTURE.lines().collect();
    let have: Vec<&str> = got.lines().collect();
    let mut diffs = Vec::new();
    for i in 0..want.len().max(have.len()) {
        let (w, h) = (want.get(i).copied(), have.get(i).copied());
        if w != h {
            diffs.push(format!(
                "line {}: expected {:?}, got {:?}",
                i + 1,
                w.unwrap_or("<eof>"),
                h.unwrap_or("<eof>")
            ));
        }
    }
    diffs
}
