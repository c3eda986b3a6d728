//! Generalized power iteration with multiplicity detection and deflation.
//!
//! Every matrix-vector product goes through a programmed crossbar. Deflation
//! changes the matrix, so each deflation step programs a fresh array.

use crate::crossbar::{CrossbarConfig, MappedMatrix, Programmer};
use crate::error::{Error, Result};
use crate::numerics::jacobi::SYMMETRY_TOLERANCE;
use crate::numerics::vector::{canonicalize_sign, dist2, dot, norm2, normalized};
use crate::numerics::{frobenius_norm, sym_eigenvalues, Matrix, SeededRng};
use crate::scalar::Real;

/// `‖A x‖` below this means the start vector lies in the null space.
pub const ZERO_ITERATE_THRESHOLD: f64 = 1e-14;
/// Gram-Schmidt residuals below this are treated as dependent.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiConfig<T> {
    pub tolerance: T,
    pub max_iterations: usize,
    pub rank_tolerance: T,
    pub accuracy_target: T,
}

impl<T: Real> Default for PiConfig<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1e-10),
            max_iterations: 1000,
            rank_tolerance: T::lit(1e-6),
            accuracy_target: T::lit(1e-4),
        }
    }
}

impl<T: Real> PiConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        if !positive(self.tolerance) || !positive(self.rank_tolerance) || !positive(self.accuracy_target) {
            return Err(Error::InvalidConfig("power iteration tolerances must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerOutcome<T> {
    /// Unit-norm final iterate.
    pub vector: Vec<T>,
    pub rayleigh: T,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominantEigenspace<T> {
    pub eigenvalue: T,
    pub multiplicity: usize,
    /// Orthonormal basis of the dominant eigenspace.
    pub basis: Vec<Vec<T>>,
    /// Total power-iteration steps across all random starts.
    pub iterations_used: usize,
    /// Largest step count of any single power-iteration run.
    pub max_run_iterations: usize,
    pub starts: usize,
}

/// `x_k = A x_{k−1} / ‖A x_{k−1}‖`, stopping once `x_k` matches `±x_{k−1}`.
pub fn power_iterate<T: Real>(xb: &MappedMatrix<T>, x0: &[T], cfg: &PiConfig<T>) -> Result<PowerOutcome<T>> {
    cfg.validate()?;
    if x0.len() != xb.dim() {
        return Err(Error::DimensionMismatch { expected: xb.dim(), found: x0.len() });
    }
    let mut x = normalized(x0).ok_or(Error::ZeroIterate)?;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        let ax = xb.multiply(&x)?;
        let norm = norm2(&ax);
        if !(norm >= T::lit(ZERO_ITERATE_THRESHOLD)) {
            return Err(Error::ZeroIterate);
        }
        let next: Vec<T> = ax.iter().map(|&v| v / norm).collect();
        iterations += 1;
        let flipped: Vec<T> = x.iter().map(|&v| -v).collect();
        let change = dist2(&next, &x).min(dist2(&next, &flipped));
        x = next;
        if change <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    let rayleigh = dot(&x, &xb.multiply(&x)?);
    Ok(PowerOutcome { vector: x, rayleigh, iterations, converged })
}

fn smallest_gram_eigenvalue<T: Real>(vectors: &[Vec<T>]) -> Result<T> {
    let p = vectors.len();
    let gram = Matrix::from_fn(p, p, |i, j| dot(&vectors[i], &vectors[j]));
    let eig = sym_eigenvalues(&gram)?;
    Ok(eig.last().copied().unwrap_or_else(T::zero))
}

/// Runs power iteration from fresh random starts until the converged vectors stop
/// adding rank. Returns the independent (normalized, not orthogonalized) vectors
/// together with their mean Rayleigh quotient.
pub fn detect_multiplicity<T: Real>(
    xb: &MappedMatrix<T>,
    cfg: &PiConfig<T>,
    rng: &mut SeededRng,
) -> Result<DetectedSpace<T>> {
    let n = xb.dim();
    let mut vectors: Vec<Vec<T>> = Vec::new();
    let mut rayleighs: Vec<T> = Vec::new();
    let mut total = 0;
    let mut longest = 0;
    let mut starts = 0;
    while vectors.len() <= n {
        let mut start_rng = rng.fork(starts as u64);
        let x0 = start_rng.unit_vector::<T>(n);
        starts += 1;
        let run = power_iterate(xb, &x0, cfg)?;
        total += run.iterations;
        longest = longest.max(run.iterations);
        if !run.converged {
            return Err(Error::NonConvergence { iterations: run.iterations });
        }
        vectors.push(run.vector);
        if smallest_gram_eigenvalue(&vectors)? < cfg.rank_tolerance {
            vectors.pop();
            break;
        }
        rayleighs.push(run.rayleigh);
    }
    let eigenvalue = rayleighs.iter().copied().sum::<T>() / T::from_count(rayleighs.len().max(1));
    Ok(DetectedSpace { eigenvalue, vectors, iterations_used: total, max_run_iterations: longest, starts })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectedSpace<T> {
    pub eigenvalue: T,
    pub vectors: Vec<Vec<T>>,
    pub iterations_used: usize,
    pub max_run_iterations: usize,
    pub starts: usize,
}

impl<T> DetectedSpace<T> {
    pub fn multiplicity(&self) -> usize {
        self.vectors.len()
    }
}

/// Classical Gram-Schmidt followed by normalization.
pub fn gram_schmidt<T: Real>(vectors: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(vectors.len());
    for (index, y) in vectors.iter().enumerate() {
        let mut r = y.clone();
        let coeffs: Vec<T> = basis.iter().map(|u| dot(u, y)).collect();
        for (u, c) in basis.iter().zip(coeffs) {
            for (ri, &ui) in r.iter_mut().zip(u) {
                *ri = *ri - c * ui;
            }
        }
        let norm = norm2(&r);
        if !(norm >= T::lit(DEPENDENCE_THRESHOLD)) {
            return Err(Error::DependentInput { index });
        }
        basis.push(r.into_iter().map(|v| v / norm).collect());
    }
    Ok(basis)
}

/// `A − λ Σ uᵢ uᵢᵀ`.
pub fn deflate<T: Real>(a: &Matrix<T>, lambda: T, basis: &[Vec<T>]) -> Matrix<T> {
    let mut out = a.clone();
    for u in basis {
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                out[(i, j)] = out[(i, j)] - lambda * u[i] * u[j];
            }
        }
    }
    out
}

pub fn dominant_eigenspace<T: Real>(
    xb: &MappedMatrix<T>,
    cfg: &PiConfig<T>,
    rng: &mut SeededRng,
) -> Result<DominantEigenspace<T>> {
    let detected = detect_multiplicity(xb, cfg, rng)?;
    let mut basis = gram_schmidt(&detected.vectors)?;
    for u in &mut basis {
        canonicalize_sign(u);
    }
    Ok(DominantEigenspace {
        eigenvalue: detected.eigenvalue,
        multiplicity: basis.len(),
        basis,
        iterations_used: detected.iterations_used,
        max_run_iterations: detected.max_run_iterations,
        starts: detected.starts,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T> {
    /// `(λ, u)` pairs in order of discovery (descending `|λ|`).
    pub pairs: Vec<(T, Vec<T>)>,
    /// Dominant-eigenspace records, one per programmed matrix.
    pub spaces: Vec<DominantEigenspace<T>>,
    pub programs: usize,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn eigenvalues(&self) -> Vec<T> {
        self.pairs.iter().map(|(l, _)| *l).collect()
    }
}

fn ensure_symmetric<T: Real>(a: &Matrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let asym = a.relative_asymmetry();
    if asym > T::lit(SYMMETRY_TOLERANCE) {
        return Err(Error::NotSymmetric { asymmetry: asym.to_f64_lossy() });
    }
    Ok(())
}

/// Completes `basis` to an orthonormal basis of the whole space with standard vectors.
fn orthonormal_complement<T: Real>(basis: &[Vec<T>], n: usize) -> Vec<Vec<T>> {
    let mut all: Vec<Vec<T>> = basis.to_vec();
    let mut extra = Vec::new();
    for e in 0..n {
        if all.len() == n {
            break;
        }
        let mut r = vec![T::zero(); n];
        r[e] = T::one();
        for u in &all {
            let c = dot(u, &r);
            for (ri, &ui) in r.iter_mut().zip(u) {
                *ri = *ri - c * ui;
            }
        }
        let norm = norm2(&r);
        if norm > T::lit(1e-6) {
            let mut v: Vec<T> = r.into_iter().map(|v| v / norm).collect();
            canonicalize_sign(&mut v);
            all.push(v.clone());
            extra.push(v);
        }
    }
    extra
}

/// Top `k` eigenpairs by repeated detection, orthonormalization and deflation.
pub fn top_k_eigen_with<T: Real>(
    a: &Matrix<T>,
    k: usize,
    cfg: &PiConfig<T>,
    programmer: &mut Programmer<T>,
) -> Result<EigenDecomposition<T>> {
    ensure_symmetric(a)?;
    cfg.validate()?;
    let n = a.rows();
    if k > n {
        return Err(Error::InvalidConfig(format!("requested {k} eigenpairs of a {n}x{n} matrix")));
    }
    let before = programmer.programs();
    let scale = frobenius_norm(a);
    let mut current = a.clone();
    let mut pairs: Vec<(T, Vec<T>)> = Vec::new();
    let mut spaces = Vec::new();
    let mut round = 0u64;
    while pairs.len() < k {
        if frobenius_norm(&current) <= T::lit(1e-12) * scale {
            let found: Vec<Vec<T>> = pairs.iter().map(|(_, u)| u.clone()).collect();
            for u in orthonormal_complement(&found, n) {
                pairs.push((T::zero(), u));
            }
            break;
        }
        let xb = programmer.program(&current)?;
        let mut rng = programmer.rng_mut().fork(0x5eed_0000 + round);
        round += 1;
        let space = dominant_eigenspace(&xb, cfg, &mut rng)?;
        for u in &space.basis {
            pairs.push((space.eigenvalue, u.clone()));
        }
        current = deflate(&current, space.eigenvalue, &space.basis);
        spaces.push(space);
    }
    pairs.truncate(k);
    Ok(EigenDecomposition { pairs, spaces, programs: programmer.programs() - before })
}

pub fn top_k_eigen<T: Real>(
    a: &Matrix<T>,
    k: usize,
    cfg: &PiConfig<T>,
    variation: T,
    rng: SeededRng,
) -> Result<EigenDecomposition<T>> {
    let mut programmer = Programmer::new(CrossbarConfig::default(), variation, rng);
    top_k_eigen_with(a, k, cfg, &mut programmer)
}

/// `‖A u − λ u‖₂`.
pub fn eigen_residual<T: Real>(a: &Matrix<T>, lambda: T, u: &[T]) -> T {
    let au = a.mul_vec_unchecked(u);
    let r: Vec<T> = au.iter().zip(u).map(|(&x, &y)| x - lambda * y).collect();
    norm2(&r)
}
