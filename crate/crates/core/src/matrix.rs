//! Dense row-major binary32 matrices and the handful of kernels the network
//! is built from.
//!
//! Loop nesting and accumulation order are fixed (row, column, then ascending
//! inner index with a single `f32` accumulator) so results are bit-reproducible
//! and module timings stay comparable across machines.

use std::fmt;

use crate::error::{Error, Result, Shape};

/// Largest binary32 value strictly below one.
const SIGMOID_CEIL: f32 = 1.0 - f32::EPSILON / 2.0;

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    values: Vec<f32>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn filled(rows: usize, cols: usize, value: f32) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::filled(rows, cols, 0.0)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.values[i * n + i] = 1.0;
        }
        Ok(m)
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::InvalidShape(format!(
                    "row {i} has {} columns, expected {cols}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, values)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> Shape {
        Shape(self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; degenerate matrices cannot be constructed.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.values[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f32) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.values[row * self.cols + col] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f32] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.values
    }

    pub fn row(&self, row: usize) -> &[f32] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f32> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    /// New matrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            values.extend(cols.iter().map(|&j| row[j]));
        }
        Self::new(self.rows, cols.len(), values)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f32) -> f32) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, k: f32) -> Self {
        self.map(|v| k * v)
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(f32, f32) -> f32) -> Result<Self> {
        self.check_same_shape(other, op)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `C = A·B` with the inner sum accumulated left to right in `f32`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape {
                op: "product",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let (m, p, n) = (self.rows, self.cols, other.cols);
        let mut out = vec![0.0f32; m * n];
        for i in 0..m {
            let a_row = &self.values[i * p..(i + 1) * p];
            for j in 0..n {
                let mut acc = 0.0f32;
                for (s, &a) in a_row.iter().enumerate() {
                    acc += a * other.values[s * n + j];
                }
                out[i * n + j] = acc;
            }
        }
        Self::new(m, n, out)
    }

    /// Element-wise product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "hadamard", |a, b| a * b)
    }

    /// Element-wise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    /// `trace(Aᵀ·B)` computed in one pass as `Σ A[i][j]·B[i][j]`.
    pub fn trace_product(&self, other: &Self) -> Result<f32> {
        self.check_same_shape(other, "trace_product")?;
        let mut trace = 0.0f32;
        for (&a, &b) in self.values.iter().zip(&other.values) {
            trace += a * b;
        }
        Ok(trace)
    }

    pub fn transpose(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                values.push(self.values[i * self.cols + j]);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            values,
        }
    }

    /// Stacks a row of `-1` on top: `[-1; Y]`.
    pub fn augment_bias(&self) -> Self {
        let mut values = Vec::with_capacity((self.rows + 1) * self.cols);
        values.resize(self.cols, -1.0);
        values.extend_from_slice(&self.values);
        Self {
            rows: self.rows + 1,
            cols: self.cols,
            values,
        }
    }

    /// Removes row 0. Fails on a single-row matrix.
    pub fn drop_first_row(&self) -> Result<Self> {
        Self::new(self.rows - 1, self.cols, self.values[self.cols..].to_vec())
    }

    /// Logistic sigmoid, element-wise.
    ///
    /// Results are kept inside the open interval (0, 1) even where binary32
    /// would round to an endpoint.
    pub fn sigmoid(&self) -> Self {
        self.map(sigmoid)
    }

    /// `y·(1−y)` for activated outputs `y ∈ [0, 1]`.
    pub fn sigmoid_derivative(&self) -> Result<Self> {
        for (idx, &y) in self.values.iter().enumerate() {
            if !(0.0..=1.0).contains(&y) {
                return Err(Error::Domain {
                    op: "sigmoid_derivative",
                    row: idx / self.cols,
                    col: idx % self.cols,
                    value: y,
                });
            }
        }
        Ok(self.map(|y| y * (1.0 - y)))
    }
}

#[inline]
pub fn sigmoid(v: f32) -> f32 {
    (1.0 / (1.0 + (-v).exp())).clamp(f32::MIN_POSITIVE, SIGMOID_CEIL)
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}
