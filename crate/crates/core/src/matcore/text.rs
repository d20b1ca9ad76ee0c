//! Plain-text matrix format.
//!
//! ```text
//! file   := header '\n' row{rows}
//! header := rows ' ' cols
//! row    := token (' ' token)* '\n'      exactly `cols` tokens per row
//! token  := real                          imaginary part 0
//!         | real ('+' | '-') ureal 'j'    e.g. 1.5-0.25j, -2e-3+1e-7j
//!         | real 'j'                      real part 0, e.g. -3j
//! ```
//!
//! `real` is anything `f64::from_str` accepts except `inf`/`nan`. Tokens are
//! separated by any run of spaces or tabs; blank lines are ignored. The
//! writer always emits the `re±imj` form using the shortest representation
//! that parses back to the same bits, so `parse(write(m)) == m` exactly.

use std::fmt::Write as _;

use super::matrix::{ComplexMatrix, C64};
use super::MatrixError;

fn parse_err(line: usize, msg: impl Into<String>) -> MatrixError {
    MatrixError::Parse {
        line,
        message: msg.into(),
    }
}

fn parse_real(s: &str, line: usize) -> Result<f64, MatrixError> {
    let v: f64 = s
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{s}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite number `{s}`")));
    }
    Ok(v)
}

/// Parses one entry token.
pub fn parse_scalar(tok: &str, line: usize) -> Result<C64, MatrixError> {
    let Some(body) = tok.strip_suffix('j') else {
        return Ok(C64::new(parse_real(tok, line)?, 0.0));
    };
    // Split at the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = parse_real(&body[..k], line)?;
            let im_str = &body[k..];
            if im_str.len() < 2 {
                return Err(parse_err(line, format!("missing imaginary part in `{tok}`")));
            }
            Ok(C64::new(re, parse_real(im_str, line)?))
        }
        None => Ok(C64::new(0.0, parse_real(body, line)?)),
    }
}

pub fn format_scalar(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}j", z.re, sign, z.im.abs())
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, MatrixError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(hline, "header must be `rows cols`"));
    }
    let parse_dim = |s: &str| -> Result<usize, MatrixError> {
        s.parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| parse_err(hline, format!("invalid dimension `{s}`")))
    };
    let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (ln, line) in lines {
        if seen == rows {
            return Err(parse_err(ln, format!("more than {rows} rows")));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != cols {
            return Err(parse_err(ln, format!("expected {cols} entries, found {}", toks.len())));
        }
        for t in toks {
            data.push(parse_scalar(t, ln)?);
        }
        seen += 1;
    }
    if seen != rows {
        return Err(parse_err(0, format!("expected {rows} rows, found {seen}")));
    }
    ComplexMatrix::from_vec(rows, cols, data)
}

pub fn write_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format_scalar(m[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
