//! Dense row-major matrices and the few vector kernels the solvers need.
//!
//! Matrix-vector products are parallel over rows; each row is summed
//! left-to-right, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::error::{argument, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return argument(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    /// Fills entry `(i, j)` with `f(i, j)`, rows in parallel.
    pub fn from_fn<F>(rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let mut data = vec![0.0; rows * cols];
        if cols > 0 {
            data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
                for (j, e) in row.iter_mut().enumerate() {
                    *e = f(i, j);
                }
            });
        }
        Self { rows, cols, data }
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

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Symmetric up to `rel_tol` relative to the larger entry of each pair.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (i + 1..self.cols).all(|j| {
                    let (a, b) = (self.get(i, j), self.get(j, i));
                    (a - b).abs() <= rel_tol * a.abs().max(b.abs())
                })
            })
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.matvec_into(x, &mut out);
        out
    }

    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "matvec: vector length");
        assert_eq!(out.len(), self.rows, "matvec: output length");
        out.par_iter_mut()
            .enumerate()
            .for_each(|(i, o)| *o = dot(self.row(i), x));
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.matvec(y))
    }

    /// Spectral-norm estimate by power iteration from the all-ones vector.
    pub fn power_norm(&self, iterations: usize) -> f64 {
        let mut v = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        let mut estimate = 0.0;
        for _ in 0..iterations {
            let w = self.matvec(&v);
            let n = norm2(&w);
            if n == 0.0 {
                return 0.0;
            }
            estimate = n;
            v = w.into_iter().map(|x| x / n).collect();
        }
        estimate
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y) {
        acc += a * b;
    }
    acc
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Euclidean projection onto the probability simplex `{w ≥ 0, Σ w = 1}`
/// by sorting and thresholding.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project onto an empty simplex");
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            threshold = t;
        } else {
            break;
        }
    }
    v.iter().map(|x| (x - threshold).max(0.0)).collect()
}
