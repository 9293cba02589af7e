//! Plain-text matrix format: a `rows cols` header line followed by
//! `rows * cols` whitespace separated values in row-major order. Vectors are
//! written as `len 1`. Values are printed with 17 significant digits so a
//! write/read cycle is exact.

use std::fmt::Write as _;
use std::path::Path;

use super::mat::Mat;
use crate::error::{IlsError, Result};

pub fn format_mat(a: &Mat) -> String {
    let mut s = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let line: Vec<String> = a.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

pub fn format_vec(v: &[f64]) -> String {
    format_mat(&Mat::from_col(v))
}

pub fn parse_mat(text: &str) -> Result<Mat> {
    let mut tokens = text.split_whitespace();
    let mut dim = |what: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| IlsError::Parse(format!("missing {what} in header")))?
            .parse::<usize>()
            .map_err(|e| IlsError::Parse(format!("bad {what}: {e}")))
    };
    let rows = dim("row count")?;
    let cols = dim("column count")?;
    let data = tokens
        .map(|t| t.parse::<f64>().map_err(|e| IlsError::Parse(format!("bad value {t:?}: {e}"))))
        .collect::<Result<Vec<f64>>>()?;
    if data.len() != rows * cols {
        return Err(IlsError::Parse(format!(
            "expected {} values for {rows}x{cols}, found {}",
            rows * cols,
            data.len()
        )));
    }
    Mat::new(rows, cols, data)
}

/// Parses a vector; both `len 1` and `1 len` headers are accepted.
pub fn parse_vec(text: &str) -> Result<Vec<f64>> {
    let m = parse_mat(text)?;
    if m.cols() != 1 && m.rows() != 1 {
        return Err(IlsError::Parse(format!("expected a vector, found {}x{}", m.rows(), m.cols())));
    }
    Ok(m.into_vec())
}

pub fn read_mat(path: &Path) -> Result<Mat> {
    parse_mat(&std::fs::read_to_string(path)?)
}

pub fn read_vec(path: &Path) -> Result<Vec<f64>> {
    parse_vec(&std::fs::read_to_string(path)?)
}

pub fn write_mat(path: &Path, a: &Mat) -> Result<()> {
    Ok(std::fs::write(path, format_mat(a))?)
}

pub fn write_vec(path: &Path, v: &[f64]) -> Result<()> {
    Ok(std::fs::write(path, format_vec(v))?)
}
