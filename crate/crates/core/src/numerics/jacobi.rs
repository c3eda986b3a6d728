//! Cyclic Jacobi eigenvalue decomposition for symmetric matrices.

use super::matrix::{frobenius_norm, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative asymmetry accepted by [`sym_eig_oracle`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    pub vector: Vec<T>,
}

/// Full spectral decomposition, eigenpairs sorted by descending eigenvalue.
pub fn sym_eig_oracle<T: Real>(a: &Matrix<T>) -> Result<Vec<EigenPair<T>>> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let asym = a.relative_asymmetry();
    if asym > T::lit(SYMMETRY_TOLERANCE) {
        return Err(Error::NotSymmetric { asymmetry: asym.to_f64_lossy() });
    }
    let n = a.rows();
    // Work on the exactly symmetrized copy.
    let mut m = Matrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)]) * T::lit(0.5));
    let mut v = Matrix::identity(n);
    let scale = frobenius_norm(&m);
    let stop = T::epsilon() * T::lit(1e-2) * scale;

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<T>()
            .sqrt();
        if off <= stop || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut pairs: Vec<EigenPair<T>> = (0..n).map(|i| EigenPair { value: m[(i, i)], vector: v.column(i) }).collect();
    pairs.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(std::cmp::Ordering::Equal));
    Ok(pairs)
}

/// Eigenvalues only, descending.
pub fn sym_eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<T>> {
    Ok(sym_eig_oracle(a)?.into_iter().map(|p| p.value).collect())
}
