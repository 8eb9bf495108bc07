//! Dense row-major matrices and a Householder QR least-squares solver.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    left: r.len(),
                    right: cols,
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.len());
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::LengthMismatch {
                    left: c.len(),
                    right: rows,
                });
            }
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        Ok(m)
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
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            self.set(i, j, *v);
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Prepends a column of ones.
    pub fn with_intercept(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            m.set(i, 0, 1.0);
            m.row_mut(i)[1..].copy_from_slice(self.row(i));
        }
        m
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }
}

/// Householder QR factorisation of a tall matrix (rows >= cols).
#[derive(Debug, Clone)]
pub struct Qr {
    // R in the upper triangle, Householder vectors below the diagonal.
    qr: Matrix,
    diag: Vec<f64>,
}

impl Qr {
    pub fn new(a: &Matrix) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if m < n {
            return Err(Error::InvalidParameter(alloc::format!(
                "least squares needs rows >= columns, got {m}x{n}"
            )));
        }
        let mut qr = a.clone();
        let mut diag = vec![0.0; n];
        for k in 0..n {
            let mut norm = 0.0f64;
            for i in k..m {
                norm = libm::hypot(norm, qr.get(i, k));
            }
            if norm != 0.0 {
                if qr.get(k, k) < 0.0 {
                    norm = -norm;
                }
                for i in k..m {
                    qr.set(i, k, qr.get(i, k) / norm);
                }
                qr.set(k, k, qr.get(k, k) + 1.0);
                for j in k + 1..n {
                    let mut s = 0.0;
                    for i in k..m {
                        s += qr.get(i, k) * qr.get(i, j);
                    }
                    s = -s / qr.get(k, k);
                    for i in k..m {
                        qr.set(i, j, qr.get(i, j) + s * qr.get(i, k));
                    }
                }
            }
            diag[k] = -norm;
        }
        Ok(Qr { qr, diag })
    }

    /// Columns whose R diagonal is negligible relative to the largest one.
    pub fn deficient_columns(&self) -> Vec<usize> {
        let scale = self.diag.iter().fold(0.0f64, |a, d| a.max(d.abs()));
        let tol = scale * 1e-10 * (self.qr.rows().max(1) as f64);
        self.diag
            .iter()
            .enumerate()
            .filter(|(_, d)| d.abs() <= tol)
            .map(|(j, _)| j)
            .collect()
    }

    /// Minimises ||A x - b||.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let (m, n) = (self.qr.rows(), self.qr.cols());
        if b.len() != m {
            return Err(Error::LengthMismatch { left: b.len(), right: m });
        }
        if !self.deficient_columns().is_empty() {
            return Err(Error::Singular);
        }
        let mut y = b.to_vec();
        for k in 0..n {
            let mut s = 0.0;
            for i in k..m {
                s += self.qr.get(i, k) * y[i];
            }
            s = -s / self.qr.get(k, k);
            for i in k..m {
                y[i] += s * self.qr.get(i, k);
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let mut s = y[k];
            for j in k + 1..n {
                s -= self.qr.get(k, j) * x[j];
            }
            x[k] = s / self.diag[k];
        }
        Ok(x)
    }

    /// (AᵀA)⁻¹ = R⁻¹R⁻ᵀ, used for coefficient standard errors.
    pub fn unscaled_covariance(&self) -> Result<Matrix> {
        let n = self.qr.cols();
        if !self.deficient_columns().is_empty() {
            return Err(Error::Singular);
        }
        // R inverse, upper triangular.
        let mut rinv = Matrix::zeros(n, n);
        for j in 0..n {
            rinv.set(j, j, 1.0 / self.diag[j]);
            for i in (0..j).rev() {
                let mut s = 0.0;
                for k in i + 1..=j {
                    s += self.qr.get(i, k) * rinv.get(k, j);
                }
                rinv.set(i, j, -s / self.diag[i]);
            }
        }
        Ok(rinv.matmul(&rinv.transpose()))
    }
}

/// Least-squares solution of `A x ≈ b` via Householder QR. Rank deficiency is
/// reported with the indices of the offending columns.
pub fn lstsq(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let qr = Qr::new(a)?;
    check_rank(&qr, a.cols())?;
    qr.solve(b)
}

pub(crate) fn check_rank(qr: &Qr, _cols: usize) -> Result<()> {
    let bad = qr.deficient_columns();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::RankDeficient {
            columns: bad.iter().map(|j| alloc::format!("{j}")).collect(),
        })
    }
}
