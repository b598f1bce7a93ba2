//! Small dense vector and matrix helpers.
//!
//! Points are plain `Vec<f64>`; everything here is written with a fixed
//! left-to-right summation order so results are reproducible bit-for-bit.

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `(1 - gamma) * a + gamma * b`
pub fn lerp(a: &[f64], b: &[f64], gamma: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(x, y)| (1.0 - gamma) * x + gamma * y)
        .collect()
}

/// `a + gamma * d`
pub fn axpy(a: &[f64], d: &[f64], gamma: f64) -> Vec<f64> {
    a.iter().zip(d).map(|(x, y)| x + gamma * y).collect()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::invalid("matrix must have at least one row"));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("matrix rows must be nonempty and equally sized"));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if !all_finite(&data) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// `M v`
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `Mᵀ v`
    pub fn mul_t_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, m) in out.iter_mut().zip(self.row(i)) {
                *o += m * vi;
            }
        }
        out
    }

    /// `uᵀ M v`
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        dot(u, &self.mul_vec(v))
    }

    /// Largest singular value by power iteration on `MᵀM`.
    ///
    /// Stops once successive estimates agree to relative tolerance `1e-10`.
    pub fn spectral_norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Deterministic start with no zero coordinates so no singular
        // direction is orthogonal to it except on a measure-zero set.
        let mut v: Vec<f64> = (0..self.cols).map(|j| 1.0 + 0.1 * j as f64).collect();
        let n0 = norm(&v);
        v.iter_mut().for_each(|x| *x /= n0);
        let mut sigma = 0.0;
        for _ in 0..10_000 {
            let w = self.mul_t_vec(&self.mul_vec(&v));
            let nw = norm(&w);
            if nw == 0.0 {
                return 0.0;
            }
            let next = nw.sqrt();
            v = w.into_iter().map(|x| x / nw).collect();
            if (next - sigma).abs() <= 1e-10 * next {
                sigma = next;
                break;
            }
            sigma = next;
        }
        // Rayleigh quotient of the final vector is the tightest estimate.
        norm(&self.mul_vec(&v)).max(sigma)
    }

    /// Maximum absolute row sum / column sum product bound `sqrt(‖M‖₁‖M‖∞)`,
    /// a cheap certified upper bound on the spectral norm.
    pub fn spectral_norm_upper_bound(&self) -> f64 {
        let max_row: f64 = (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let max_col: f64 = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        (max_row * max_col).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_products_agree() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 4.0]]).unwrap();
        let u = [0.3, -2.0];
        let v = [1.0, 2.0, -1.0];
        assert!((m.bilinear(&u, &v) - dot(&m.mul_t_vec(&u), &v)).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -5.0]]).unwrap();
        assert!((m.spectral_norm() - 5.0).abs() < 1e-9);
        assert!(m.spectral_norm_upper_bound() >= 5.0);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Matrix::from_rows(&[vec![f64::NAN]]).is_err());
    }
}
