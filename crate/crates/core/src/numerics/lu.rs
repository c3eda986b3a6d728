//! Partial-pivoted LU factorization.

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Pivots smaller than this fraction of the largest input entry are treated as zero.
pub const PIVOT_RELATIVE_THRESHOLD: f64 = 1e-12;

/// `P A = L U` with unit lower-triangular `L` stored below the diagonal of `lu`.
#[derive(Debug, Clone)]
pub struct LuFactorization<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> LuFactorization<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = T::lit(PIVOT_RELATIVE_THRESHOLD) * a.max_abs();
        let data = lu.as_mut_slice();

        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|i| (i, data[i * n + k].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            // NaN pivots compare false everywhere and stay at -1.
            if !(pivot_abs > threshold) {
                return Err(Error::SingularMatrix { pivot_index: k });
            }
            if pivot_row != k {
                for j in 0..n {
                    data.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = data[k * n + k];
            let (upper, lower) = data.split_at_mut((k + 1) * n);
            let pivot_tail = &upper[k * n + k + 1..k * n + n];
            for row in lower.chunks_exact_mut(n) {
                let factor = row[k] / pivot;
                row[k] = factor;
                if factor != T::zero() {
                    for (dst, &src) in row[k + 1..].iter_mut().zip(pivot_tail) {
                        *dst = *dst - factor * src;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        let data = self.lu.as_slice();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &data[i * n..i * n + i];
            let s: T = row.iter().zip(&x[..i]).map(|(&l, &v)| l * v).sum();
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let row = &data[i * n + i + 1..(i + 1) * n];
            let s: T = row.iter().zip(&x[i + 1..]).map(|(&u, &v)| u * v).sum();
            x[i] = (x[i] - s) / data[i * n + i];
        }
        Ok(x)
    }
}

/// Solves `A x = b` by partial-pivoted Gaussian elimination.
pub fn direct_solve<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    LuFactorization::new(a)?.solve(b)
}
