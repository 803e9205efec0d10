//! Plain-text matrices: a `dims: r c` header followed by `r` lines of `c`
//! whitespace-separated numbers. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{NaveError, Result};
use crate::linalg::DenseMatrix;

fn parse_err(line: usize, msg: impl std::fmt::Display) -> NaveError {
    NaveError::Parse(format!("line {line}: {msg}"))
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (n, head) = lines.next().ok_or_else(|| NaveError::Parse("empty matrix file".into()))?;
    let dims = head
        .strip_prefix("dims:")
        .ok_or_else(|| parse_err(n, "expected 'dims: r c'"))?;
    let dims: Vec<usize> = dims
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(n, format!("bad dimension '{t}'"))))
        .collect::<Result<_>>()?;
    let [r, c] = dims[..] else {
        return Err(parse_err(n, "expected two dimensions"));
    };
    let mut data = Vec::with_capacity(r * c);
    let mut seen = 0;
    for (n, l) in lines {
        let row: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(n, format!("bad number '{t}'"))))
            .collect::<Result<_>>()?;
        if row.len() != c {
            return Err(parse_err(n, format!("expected {c} entries, found {}", row.len())));
        }
        data.extend(row);
        seen += 1;
    }
    if seen != r {
        return Err(NaveError::Parse(format!("expected {r} rows, found {seen}")));
    }
    DenseMatrix::from_row_major(r, c, data)
}

/// A vector is an `n x 1` or `1 x n` matrix.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let m = parse_matrix(text)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(NaveError::Parse(format!("expected a vector, found {} x {}", m.rows(), m.cols())));
    }
    Ok(m.as_slice().to_vec())
}

pub fn render_matrix(m: &DenseMatrix) -> String {
    let mut s = format!("dims: {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
        writeln!(s, "{}", row.join(" ")).expect("writing to a String");
    }
    s
}

pub fn render_vector(v: &[f64]) -> String {
    render_matrix(&DenseMatrix::from_row_major(v.len(), 1, v.to_vec()).expect("n entries"))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    parse_matrix(&fs::read_to_string(path).map_err(|e| NaveError::io(path, e))?)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&fs::read_to_string(path).map_err(|e| NaveError::io(path, e))?)
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    fs::write(path, render_matrix(m)).map_err(|e| NaveError::io(path, e))
}
