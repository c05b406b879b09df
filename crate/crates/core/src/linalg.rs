//! Small dense linear algebra: row-major matrices, lower-triangular
//! operations and GTH (Grassmann–Taksar–Heyman) elimination.
//!
//! Matrices in this crate are at most a few hundred rows, so everything is
//! stored densely.

use std::ops::{Index, IndexMut};

use crate::error::{Result, SlowdownError, Stage};

#[derive(Debug, Clone, PartialEq)]
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

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Matrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(n_rows, n_cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged rows");
            m.row_mut(i).copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += vi * m;
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn right_mul(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| self.row(i)[(i + 1).min(self.cols)..].iter().all(|&v| v == 0.0))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix whose entries above the diagonal are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular(Matrix);

impl LowerTriangular {
    pub fn new(m: Matrix) -> Option<Self> {
        (m.is_square() && m.is_lower_triangular()).then_some(LowerTriangular(m))
    }

    pub fn order(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Inverse by forward substitution, column by column.
    ///
    /// Fails when a diagonal entry is smaller than `tol` in magnitude.
    pub fn inverse(&self, tol: f64) -> std::result::Result<LowerTriangular, usize> {
        let n = self.order();
        let a = &self.0;
        if let Some(j) = (0..n).find(|&j| a[(j, j)].abs() <= tol) {
            return Err(j);
        }
        let mut inv = Matrix::zeros(n, n);
        for j in 0..n {
            inv[(j, j)] = 1.0 / a[(j, j)];
            for i in j + 1..n {
                let acc: f64 = (j..i).map(|k| a[(i, k)] * inv[(k, j)]).sum();
                inv[(i, j)] = -acc / a[(i, i)];
            }
        }
        Ok(LowerTriangular(inv))
    }
}

impl Index<(usize, usize)> for LowerTriangular {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Stationary vector of a generator (or its off-diagonal part) by GTH
/// elimination. States are censored from the highest index down, so state 0
/// is eliminated last and receives the value 1 before normalisation. The
/// diagonal is never read.
///
/// Returns the unnormalised vector.
pub fn gth_unnormalized(q: &Matrix, stage: Stage) -> Result<Vec<f64>> {
    assert!(q.is_square());
    let n = q.rows();
    let mut a = q.clone();
    for k in (1..n).rev() {
        let out: f64 = a.row(k)[..k].iter().sum();
        if !(out > 0.0) {
            return Err(SlowdownError::numerical(
                stage,
                format!("GTH pivot {k} has no outflow to lower states"),
            ));
        }
        for i in 0..k {
            a[(i, k)] /= out;
        }
        for i in 0..k {
            let aik = a[(i, k)];
            if aik == 0.0 {
                continue;
            }
            for j in 0..k {
                if i != j {
                    let akj = a[(k, j)];
                    a[(i, j)] += aik * akj;
                }
            }
        }
    }
    let mut pi = vec![0.0; n];
    if n > 0 {
        pi[0] = 1.0;
    }
    for k in 1..n {
        pi[k] = (0..k).map(|i| pi[i] * a[(i, k)]).sum();
    }
    Ok(pi)
}

/// Stationary distribution (normalised) by GTH elimination.
pub fn gth_stationary(q: &Matrix, stage: Stage) -> Result<Vec<f64>> {
    let mut pi = gth_unnormalized(q, stage)?;
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    Ok(pi)
}

/// Generator with bounded bandwidth, stored row-wise over the window
/// `[i - bandwidth, i + bandwidth]`.
#[derive(Debug, Clone)]
pub struct BandedGenerator {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl BandedGenerator {
    pub fn new(n: usize, bandwidth: usize) -> Self {
        BandedGenerator {
            n,
            bandwidth,
            data: vec![0.0; n * (2 * bandwidth + 1)],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.bandwidth, "({i},{j}) outside band");
        i * (2 * self.bandwidth + 1) + (j + self.bandwidth - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.bandwidth {
            0.0
        } else {
            self.data[self.offset(i, j)]
        }
    }

    /// Adds a transition rate `i -> j`; the diagonal is kept consistent.
    pub fn add_rate(&mut self, i: usize, j: usize, rate: f64) {
        if i == j || rate == 0.0 {
            return;
        }
        let o = self.offset(i, j);
        self.data[o] += rate;
        let d = self.offset(i, i);
        self.data[d] -= rate;
    }

    /// Row sums of `pi Q` for a row vector `pi`, i.e. the global balance residual.
    pub fn left_mul(&self, pi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, &p) in pi.iter().enumerate() {
            let lo = i.saturating_sub(self.bandwidth);
            let hi = (i + self.bandwidth).min(self.n - 1);
            for j in lo..=hi {
                out[j] += p * self.get(i, j);
            }
        }
        out
    }

    /// Normalised stationary vector via banded GTH; fill-in stays in the band.
    pub fn gth_stationary(&self, stage: Stage) -> Result<Vec<f64>> {
        let n = self.n;
        let bw = self.bandwidth;
        let mut a = self.clone();
        for k in (1..n).rev() {
            let lo = k.saturating_sub(bw);
            let out: f64 = (lo..k).map(|j| a.get(k, j)).sum();
            if !(out > 0.0) {
                return Err(SlowdownError::numerical(
                    stage,
                    format!("banded GTH pivot {k} has no outflow to lower states"),
                ));
            }
            for i in lo..k {
                let o = a.offset(i, k);
                a.data[o] /= out;
            }
            for i in lo..k {
                let aik = a.data[a.offset(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in lo..k {
                    if i != j {
                        let akj = a.data[a.offset(k, j)];
                        if akj != 0.0 {
                            let o = a.offset(i, j);
                            a.data[o] += aik * akj;
                        }
                    }
                }
            }
        }
        let mut pi = vec![0.0; n];
        if n == 0 {
            return Ok(pi);
        }
        pi[0] = 1.0;
        for k in 1..n {
            let lo = k.saturating_sub(bw);
            pi[k] = (lo..k).map(|i| pi[i] * a.data[a.offset(i, k)]).sum();
        }
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= total);
        Ok(pi)
    }
}
