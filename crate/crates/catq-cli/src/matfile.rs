//! Text format for complex matrices: first line the dimension n, then n rows
//! of n whitespace-separated "re,im" entries. Values are written with Rust's
//! shortest round-trip float formatting, so write-then-read is exact.

use catq_core::CMatrix;
use ndarray::Array2;
use num_complex::Complex64;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "matrix parse error at line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

fn fail(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_matrix(text: &str) -> Result<CMatrix, ParseError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| fail(1, 1, "empty file"))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| fail(1, 1, format!("expected matrix dimension, found {header:?}")))?;
    if n == 0 {
        return Err(fail(1, 1, "dimension must be positive"));
    }

    let mut data = Array2::<Complex64>::zeros((n, n));
    let mut row = 0;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if row >= n {
            return Err(fail(line_no, 1, format!("expected only {n} rows")));
        }
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != n {
            return Err(fail(
                line_no,
                1,
                format!("row {} has {} entries, expected {n}", row + 1, entries.len()),
            ));
        }
        for (col, entry) in entries.iter().enumerate() {
            let (re_str, im_str) = entry.split_once(',').ok_or_else(|| {
                fail(
                    line_no,
                    col + 1,
                    format!("entry {entry:?} is not a re,im pair"),
                )
            })?;
            let re: f64 = re_str.parse().map_err(|_| {
                fail(line_no, col + 1, format!("bad real part {re_str:?}"))
            })?;
            let im: f64 = im_str.parse().map_err(|_| {
                fail(line_no, col + 1, format!("bad imaginary part {im_str:?}"))
            })?;
            data[[row, col]] = Complex64::new(re, im);
        }
        row += 1;
    }
    if row != n {
        return Err(fail(row + 1, 1, format!("expected {n} rows, found {row}")));
    }
    CMatrix::new(data).map_err(|e| fail(1, 1, format!("{e}")))
}

pub fn load_hamiltonian(path: &Path) -> Result<CMatrix, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(0, 0, format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub fn format_matrix(m: &CMatrix) -> String {
    let n = m.dim();
    let a = m.as_array();
    let mut out = String::new();
    out.push_str(&format!("{n}\n"));
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| format!("{},{}", a[[i, j]].re, a[[i, j]].im))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
