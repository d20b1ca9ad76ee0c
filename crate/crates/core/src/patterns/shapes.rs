//! Primitive `(0,*)` shapes whose stars all lie in one row or column.
//!
//! The north-west shapes put a line of `min(m, n)` positions along the short
//! side touching the top-left corner: the first column when `m < n`, the
//! first row when `m > n`, either when square ([`LineForm`]). The line is
//! filled completely (arrow), on every other position starting with a star
//! (vdash), or on every other position starting with a zero (models). The
//! other corners are clockwise rotations of the north-west shape by 90°,
//! 180° and 270°.

use serde::{Deserialize, Serialize};

use super::{PatternError, StarPattern};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    NW,
    NE,
    SE,
    SW,
}

impl Corner {
    fn quarter_turns(self) -> usize {
        match self {
            Corner::NW => 0,
            Corner::NE => 1,
            Corner::SE => 2,
            Corner::SW => 3,
        }
    }
}

/// Fill rule along the corner line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Line {
    /// `*, *, *, …`
    Arrow,
    /// `*, 0, *, 0, …`
    Vdash,
    /// `0, *, 0, *, …`
    Models,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    Corner(Corner, Line),
    /// A full first (or last) row.
    UpDown,
    /// `m × n` with `m ≤ n`: stars at row `m`, columns `m+2 ..= n`.
    LastRowTail,
    Zero,
    Full,
}

/// Which side carries the line of a square north-west shape (before rotation).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineForm {
    #[default]
    Column,
    Row,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpDownForm {
    #[default]
    FirstRow,
    LastRow,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeOptions {
    pub square_line: LineForm,
    pub updown: UpDownForm,
}

fn north_west(rows: usize, cols: usize, line: Line, form: LineForm) -> StarPattern {
    let along_column = rows < cols || (rows == cols && form == LineForm::Column);
    let len = rows.min(cols);
    let keep = |t: usize| match line {
        Line::Arrow => true,
        Line::Vdash => t % 2 == 0,
        Line::Models => t % 2 == 1,
    };
    let stars = (0..len)
        .filter(|&t| keep(t))
        .map(|t| if along_column { (t + 1, 1) } else { (1, t + 1) });
    StarPattern::from_stars(rows, cols, stars).expect("line lies inside the box")
}

/// The `m × n` star set of a primitive shape.
pub fn primitive_shape(shape: Shape, m: usize, n: usize, opts: ShapeOptions) -> Result<StarPattern, PatternError> {
    Ok(match shape {
        Shape::Corner(corner, line) => {
            let turns = corner.quarter_turns();
            // An odd number of quarter turns swaps the box dimensions.
            let (r, c) = if turns % 2 == 1 { (n, m) } else { (m, n) };
            north_west(r, c, line, opts.square_line).rotate_cw_times(turns)
        }
        Shape::UpDown => {
            let row = match opts.updown {
                UpDownForm::FirstRow => 1,
                UpDownForm::LastRow => m,
            };
            StarPattern::from_stars(m, n, (1..=n).map(|j| (row, j)))?
        }
        Shape::LastRowTail => {
            if m > n {
                return Err(PatternError::TailNeedsWide { m, n });
            }
            StarPattern::from_stars(m, n, (m + 2..=n).map(|j| (m, j)))?
        }
        Shape::Zero => StarPattern::empty(m, n),
        Shape::Full => StarPattern::full(m, n),
    })
}
