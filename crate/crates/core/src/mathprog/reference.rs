//! Variation-free reference solutions.
//!
//! These never touch a crossbar. The ADMM reference projects onto
//! `{x : G x = h}` in closed form, `x = α − Gᵀ (G Gᵀ)⁻¹ (G α − h)`, instead of
//! solving the KKT system, and basic-feasible-solution enumeration provides an
//! exact LP optimum for small instances.

use super::{project_nonneg, project_soc, LpProblem, SocpProblem};
use crate::admm::{self, AdmmConfig, AdmmOutcome, AdmmState};
use crate::error::Result;
use crate::numerics::{LuFactorization, Matrix};
use crate::scalar::Real;

pub const REFERENCE_EPSILON: f64 = 1e-8;
pub const REFERENCE_MAX_ITERATIONS: usize = 400_000;

/// Largest LP dimension solved by vertex enumeration.
pub const ENUMERATION_MAX_DIM: usize = 12;

/// Exact Euclidean projection onto an affine set `{x : G x = h}`.
#[derive(Debug, Clone)]
pub struct AffineProjector<T> {
    g: Matrix<T>,
    h: Vec<T>,
    ggt: Option<LuFactorization<T>>,
}

impl<T: Real> AffineProjector<T> {
    pub fn new(g: &Matrix<T>, h: &[T]) -> Result<Self> {
        let ggt = if g.rows() > 0 { Some(LuFactorization::new(&g.transpose().gram())?) } else { None };
        Ok(Self { g: g.clone(), h: h.to_vec(), ggt })
    }

    pub fn project(&self, alpha: &[T]) -> Result<Vec<T>> {
        let Some(lu) = &self.ggt else {
            return Ok(alpha.to_vec());
        };
        let resid: Vec<T> = self.g.mul_vec(alpha)?.iter().zip(&self.h).map(|(&a, &b)| a - b).collect();
        let w = lu.solve(&resid)?;
        let corr = self.g.tr_mul_vec(&w)?;
        Ok(alpha.iter().zip(&corr).map(|(&a, &c)| a - c).collect())
    }
}

fn reference_admm<T: Real>(cost: &[T], g: &Matrix<T>, h: &[T], rho: T, second_order: bool) -> Result<AdmmOutcome<T>> {
    let proj = AffineProjector::new(g, h)?;
    let cfg = AdmmConfig::new(rho, T::lit(REFERENCE_EPSILON), REFERENCE_MAX_ITERATIONS);
    admm::run(
        |y: &[T], mu: &[T], rho: T| {
            let alpha: Vec<T> = y.iter().zip(mu).zip(cost).map(|((&y, &m), &d)| y - (m + d) / rho).collect();
            proj.project(&alpha)
        },
        |x: &[T], mu: &[T], rho: T| {
            let beta: Vec<T> = x.iter().zip(mu).map(|(&x, &m)| x + m / rho).collect();
            Ok(if second_order { project_soc(&beta) } else { project_nonneg(&beta) })
        },
        &cfg,
        AdmmState::zeros(cost.len()),
    )
}

/// High-accuracy (`ε = 1e-8`) variation-free ADMM solution of an LP.
pub fn reference_lp<T: Real>(p: &LpProblem<T>, rho: T) -> Result<AdmmOutcome<T>> {
    reference_admm(&p.cost, &p.eq_matrix, &p.eq_rhs, rho, false)
}

/// High-accuracy (`ε = 1e-8`) variation-free ADMM solution of an SOCP.
pub fn reference_socp<T: Real>(p: &SocpProblem<T>, rho: T) -> Result<AdmmOutcome<T>> {
    reference_admm(&p.cost, &p.eq_matrix, &p.eq_rhs, rho, true)
}

/// Optimal vertex of a bounded LP by enumerating every basis of size `l`.
/// Returns `None` when no basic feasible solution exists.
pub fn enumerate_vertices<T: Real>(p: &LpProblem<T>) -> Option<(Vec<T>, T)> {
    let n = p.dim();
    let l = p.eq_matrix.rows();
    assert!(n <= ENUMERATION_MAX_DIM, "vertex enumeration limited to n <= {ENUMERATION_MAX_DIM}");
    let feas_tol = T::lit(1e-9);
    let mut best: Option<(Vec<T>, T)> = None;
    let mut basis: Vec<usize> = (0..l).collect();
    loop {
        let sub = Matrix::from_fn(l, l, |i, j| p.eq_matrix[(i, basis[j])]);
        if let Ok(lu) = LuFactorization::new(&sub) {
            if let Ok(xb) = lu.solve(&p.eq_rhs) {
                if xb.iter().all(|&v| v >= -feas_tol) {
                    let mut x = vec![T::zero(); n];
                    for (&j, &v) in basis.iter().zip(&xb) {
                        x[j] = v.max(T::zero());
                    }
                    let obj = p.objective(&x);
                    if best.as_ref().map_or(true, |(_, b)| obj < *b) {
                        best = Some((x, obj));
                    }
                }
            }
        }
        if !next_combination(&mut basis, n) {
            break;
        }
    }
    best
}

/// Advances `comb` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
