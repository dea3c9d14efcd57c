//! Dense row-major matrix of `f64` and the `ndae-matrix v1` file format.
//!
//! ```text
//! ndae-matrix v1 <rows> <cols>
//! <v0>,<v1>,...,<v(cols-1)>
//! ...
//! ```
//!
//! Values are written in Rust's shortest round-trip decimal form, so a
//! written matrix reads back bit-identically.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::textio::Lines;

const MATRIX_MAGIC: &str = "ndae-matrix";
const MATRIX_VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("row length {actual} does not match column count {expected}")]
    RowLength { expected: usize, actual: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::RowLength { expected: rows * cols, actual: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equally sized rows. An empty iterator yields a
    /// `0 x cols` matrix.
    pub fn from_rows<I, R>(cols: usize, rows: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[f64]>,
    {
        let mut data = Vec::new();
        let mut n = 0;
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(MatrixError::RowLength { expected: cols, actual: row.len() });
            }
            data.extend_from_slice(row);
            n += 1;
        }
        Ok(Matrix { rows: n, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: indices.len(), cols: self.cols, data }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), MatrixError> {
        writeln!(w, "{MATRIX_MAGIC} {MATRIX_VERSION} {} {}", self.rows, self.cols)?;
        let mut line = String::new();
        for row in self.iter_rows() {
            line.clear();
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&v.to_string());
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Matrix, MatrixError> {
        let mut lines = Lines::new(reader);
        let header = lines.next_line()?.ok_or(MatrixError::Format { line: 1, msg: "missing header".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || MatrixError::Format {
            line: 1,
            msg: format!("expected `{MATRIX_MAGIC} {MATRIX_VERSION} <rows> <cols>`, got `{header}`"),
        };
        if fields.len() != 4 || fields[0] != MATRIX_MAGIC || fields[1] != MATRIX_VERSION {
            return Err(bad_header());
        }
        let rows: usize = fields[2].parse().map_err(|_| bad_header())?;
        let cols: usize = fields[3].parse().map_err(|_| bad_header())?;

        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = lines.next_line()?.ok_or_else(|| MatrixError::Format {
                line: lines.line_no() + 1,
                msg: format!("expected {rows} rows"),
            })?;
            let before = data.len();
            for field in line.split(',') {
                let v: f64 = field.trim().parse().map_err(|_| MatrixError::Format {
                    line: lines.line_no(),
                    msg: format!("not a number: `{field}`"),
                })?;
                data.push(v);
            }
            if data.len() - before != cols {
                return Err(MatrixError::Format {
                    line: lines.line_no(),
                    msg: format!("expected {cols} values, found {}", data.len() - before),
                });
            }
        }
        if lines.next_line()?.is_some() {
            return Err(MatrixError::Format {
                line: lines.line_no(),
                msg: format!("more than the declared {rows} rows"),
            });
        }
        Ok(Matrix { rows, cols, data })
    }
}
