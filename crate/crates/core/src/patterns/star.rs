use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::PatternError;

/// Star positions of a `(0,*)` matrix, 1-based `(row, col)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternJson", into = "PatternJson")]
pub struct StarPattern {
    rows: usize,
    cols: usize,
    stars: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    rows: usize,
    cols: usize,
    stars: Vec<[usize; 2]>,
}

impl TryFrom<PatternJson> for StarPattern {
    type Error = PatternError;

    fn try_from(p: PatternJson) -> Result<Self, PatternError> {
        StarPattern::from_stars(p.rows, p.cols, p.stars.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<StarPattern> for PatternJson {
    fn from(p: StarPattern) -> Self {
        PatternJson {
            rows: p.rows,
            cols: p.cols,
            stars: p.stars.into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

impl StarPattern {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            stars: BTreeSet::new(),
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            stars: (1..=rows).flat_map(|i| (1..=cols).map(move |j| (i, j))).collect(),
        }
    }

    pub fn from_stars(
        rows: usize,
        cols: usize,
        stars: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, PatternError> {
        let mut p = Self::empty(rows, cols);
        for (i, j) in stars {
            p.insert(i, j)?;
        }
        Ok(p)
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<(), PatternError> {
        if i == 0 || j == 0 || i > self.rows || j > self.cols {
            return Err(PatternError::OutOfBounds {
                pos: (i, j),
                rows: self.rows,
                cols: self.cols,
            });
        }
        self.stars.insert((i, j));
        Ok(())
    }

    pub fn remove(&mut self, i: usize, j: usize) -> bool {
        self.stars.remove(&(i, j))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.stars.contains(&(i, j))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stars.is_empty()
    }

    /// Stars in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.stars.iter().copied()
    }

    /// Copies `other`'s stars shifted by the 0-based offsets.
    pub fn embed(&mut self, other: &StarPattern, row_off: usize, col_off: usize) {
        assert!(row_off + other.rows <= self.rows && col_off + other.cols <= self.cols);
        self.stars
            .extend(other.iter().map(|(i, j)| (i + row_off, j + col_off)));
    }

    /// The sub-pattern in the window starting at the 0-based offsets.
    pub fn restrict(&self, row_off: usize, col_off: usize, rows: usize, cols: usize) -> StarPattern {
        StarPattern {
            rows,
            cols,
            stars: self
                .iter()
                .filter(|&(i, j)| i > row_off && i <= row_off + rows && j > col_off && j <= col_off + cols)
                .map(|(i, j)| (i - row_off, j - col_off))
                .collect(),
        }
    }

    pub fn transpose(&self) -> StarPattern {
        StarPattern {
            rows: self.cols,
            cols: self.rows,
            stars: self.iter().map(|(i, j)| (j, i)).collect(),
        }
    }

    pub fn union(&self, other: &StarPattern) -> StarPattern {
        assert_eq!(self.shape(), other.shape());
        StarPattern {
            rows: self.rows,
            cols: self.cols,
            stars: self.stars.union(&other.stars).copied().collect(),
        }
    }

    /// Clockwise quarter turn: `(i, j) ↦ (j, rows+1−i)`, shape becomes `cols × rows`.
    pub fn rotate_cw(&self) -> StarPattern {
        StarPattern {
            rows: self.cols,
            cols: self.rows,
            stars: self.iter().map(|(i, j)| (j, self.rows + 1 - i)).collect(),
        }
    }

    pub fn rotate_cw_times(&self, quarter_turns: usize) -> StarPattern {
        (0..quarter_turns % 4).fold(self.clone(), |p, _| p.rotate_cw())
    }

    /// Grid of `0` and `*`, one line per row, entries separated by spaces.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for i in 1..=self.rows {
            let row: Vec<&str> = (1..=self.cols)
                .map(|j| if self.contains(i, j) { "*" } else { "0" })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for StarPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
