//! Random problem generators with known structure.

use crate::admm::AdmmOutcome;
use crate::cs::{CsProblem, SparseSignal};
use crate::eigen::gram_schmidt;
use crate::error::{Error, Result};
use crate::mathprog::reference::{reference_lp, reference_socp};
use crate::mathprog::{check_full_row_rank, LpProblem, SocpProblem};
use crate::numerics::vector::norm2;
use crate::numerics::{Matrix, SeededRng};
use crate::scalar::Real;

pub const MAX_RESAMPLES: usize = 100;
/// A reference solution longer than this multiple of `‖x_feas‖` counts as unbounded.
pub const UNBOUNDED_FACTOR: f64 = 1e3;
pub const DEFAULT_NOISE_BOUND: f64 = 1e-3;
/// Standard deviation of the measurement noise (variance 0.01).
pub const DEFAULT_NOISE_STD: f64 = 0.1;
pub const DEFAULT_DOMINANT_EIGENVALUE: f64 = 10.0;
pub const DEFAULT_GAP_FRACTION: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct GeneratedLp<T> {
    pub problem: LpProblem<T>,
    pub x_feas: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct GeneratedSocp<T> {
    pub problem: SocpProblem<T>,
    pub x_feas: Vec<T>,
}

fn full_rank_gaussian<T: Real>(l: usize, n: usize, rng: &mut SeededRng) -> Result<Matrix<T>> {
    for _ in 0..MAX_RESAMPLES {
        let g = rng.gaussian_matrix::<T>(l, n);
        if check_full_row_rank(&g).is_ok() {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailure { attempts: MAX_RESAMPLES })
}

/// Gaussian `G`, `h = G x_feas` with `x_feas ∈ [0, 1]ⁿ`, and `d = Gᵀλ + s` with
/// `s > 0`, which makes the problem dual feasible and therefore bounded.
pub fn generate_lp<T: Real>(n: usize, l: usize, rng: &mut SeededRng) -> Result<GeneratedLp<T>> {
    if l >= n {
        return Err(Error::InvalidConfig(format!("need l < n, got l = {l}, n = {n}")));
    }
    let g = full_rank_gaussian::<T>(l, n, rng)?;
    let x_feas: Vec<T> = (0..n).map(|_| rng.uniform(T::zero(), T::one())).collect();
    let h = g.mul_vec(&x_feas)?;
    let lambda = rng.gaussian_vec::<T>(l);
    let slack: Vec<T> = (0..n).map(|_| rng.uniform(T::zero(), T::one())).collect();
    let cost: Vec<T> = g.tr_mul_vec(&lambda)?.iter().zip(&slack).map(|(&a, &s)| a + s).collect();
    Ok(GeneratedLp { problem: LpProblem::new(cost, g, h)?, x_feas })
}

/// As [`generate_lp`] with `x_feas` strictly inside the cone and the cost slack
/// in the interior of the (self-dual) cone.
pub fn generate_socp<T: Real>(n: usize, l: usize, rng: &mut SeededRng) -> Result<GeneratedSocp<T>> {
    if l >= n || n < 2 {
        return Err(Error::InvalidConfig(format!("need 2 <= n and l < n, got l = {l}, n = {n}")));
    }
    let g = full_rank_gaussian::<T>(l, n, rng)?;
    let mut x_feas = rng.gaussian_vec::<T>(n);
    x_feas[n - 1] = norm2(&x_feas[..n - 1]) + T::one();
    let h = g.mul_vec(&x_feas)?;
    let lambda = rng.gaussian_vec::<T>(l);
    let mut slack = rng.gaussian_vec::<T>(n);
    slack[n - 1] = norm2(&slack[..n - 1]) + rng.uniform(T::lit(0.1), T::one());
    let cost: Vec<T> = g.tr_mul_vec(&lambda)?.iter().zip(&slack).map(|(&a, &s)| a + s).collect();
    Ok(GeneratedSocp { problem: SocpProblem::new(cost, g, h)?, x_feas })
}

fn accept<T: Real>(outcome: &AdmmOutcome<T>, x_feas: &[T]) -> bool {
    outcome.converged && norm2(&outcome.state.x) <= T::lit(UNBOUNDED_FACTOR) * norm2(x_feas)
}

/// Generates LPs until the high-accuracy reference converges to a bounded point.
pub fn generate_lp_with_reference<T: Real>(
    n: usize,
    l: usize,
    rng: &mut SeededRng,
    reference_rho: T,
) -> Result<(GeneratedLp<T>, Vec<T>)> {
    for _ in 0..MAX_RESAMPLES {
        let generated = generate_lp::<T>(n, l, rng)?;
        let outcome = reference_lp(&generated.problem, reference_rho)?;
        if accept(&outcome, &generated.x_feas) {
            return Ok((generated, outcome.state.y));
        }
    }
    Err(Error::GenerationFailure { attempts: MAX_RESAMPLES })
}

pub fn generate_socp_with_reference<T: Real>(
    n: usize,
    l: usize,
    rng: &mut SeededRng,
    reference_rho: T,
) -> Result<(GeneratedSocp<T>, Vec<T>)> {
    for _ in 0..MAX_RESAMPLES {
        let generated = generate_socp::<T>(n, l, rng)?;
        let outcome = reference_socp(&generated.problem, reference_rho)?;
        if accept(&outcome, &generated.x_feas) {
            return Ok((generated, outcome.state.y));
        }
    }
    Err(Error::GenerationFailure { attempts: MAX_RESAMPLES })
}

/// Gaussian `q × p` sensing matrix, `s` standard-normal spikes on a uniformly
/// random support, `h = H z* + v` with `v ~ N(0, noise_std² I)`.
pub fn generate_cs<T: Real>(
    p: usize,
    q: usize,
    s: usize,
    noise_std: T,
    noise_bound: T,
    rng: &mut SeededRng,
) -> Result<(CsProblem<T>, SparseSignal<T>)> {
    if s > p {
        return Err(Error::InvalidConfig(format!("sparsity {s} exceeds signal length {p}")));
    }
    let h_mat = rng.gaussian_matrix::<T>(q, p);
    let mut z = vec![T::zero(); p];
    for i in rng.sample_indices(p, s) {
        let mut v = rng.gaussian::<T>();
        while v == T::zero() {
            v = rng.gaussian::<T>();
        }
        z[i] = v;
    }
    let mut h = h_mat.mul_vec(&z)?;
    for hi in &mut h {
        *hi = *hi + noise_std * rng.gaussian::<T>();
    }
    Ok((CsProblem::new(h_mat, h, noise_bound)?, SparseSignal::new(z)))
}

/// Random orthogonal `n × n` matrix from Gram-Schmidt on a Gaussian sample.
pub fn random_orthogonal<T: Real>(n: usize, rng: &mut SeededRng) -> Result<Matrix<T>> {
    for _ in 0..MAX_RESAMPLES {
        let cols: Vec<Vec<T>> = (0..n).map(|_| rng.gaussian_vec::<T>(n)).collect();
        if let Ok(q) = gram_schmidt(&cols) {
            return Matrix::from_columns(&q);
        }
    }
    Err(Error::GenerationFailure { attempts: MAX_RESAMPLES })
}

/// `Q Λ Qᵀ` with `m` copies of `λ₁` and the other eigenvalues uniform in
/// `(−(λ₁ − gap), λ₁ − gap)`.
pub fn generate_sym_with_multiplicity<T: Real>(
    n: usize,
    m: usize,
    lambda1: T,
    gap: T,
    rng: &mut SeededRng,
) -> Result<Matrix<T>> {
    if m == 0 || m > n {
        return Err(Error::InvalidConfig(format!("multiplicity must be in 1..={n}, got {m}")));
    }
    if !(gap > T::zero() && gap < lambda1) {
        return Err(Error::InvalidConfig("gap must lie in (0, λ₁)".into()));
    }
    let bound = lambda1 - gap;
    let spectrum: Vec<T> = (0..n).map(|i| if i < m { lambda1 } else { rng.uniform(-bound, bound) }).collect();
    let q = random_orthogonal::<T>(n, rng)?;
    let mut a = Matrix::from_fn(n, n, |i, j| (0..n).map(|k| q[(i, k)] * spectrum[k] * q[(j, k)]).sum());
    for i in 0..n {
        for j in 0..i {
            a[(i, j)] = a[(j, i)];
        }
    }
    Ok(a)
}
