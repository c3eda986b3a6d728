//! Robust compressive sensing on a crossbar.
//!
//! Solves `minimize ‖z‖₁  s.t.  ‖H z − h‖₂ ≤ ξ` through the splitting
//! `z = w`, `s = u` with `H z − s = h` and `‖u‖₂ ≤ ξ`. The `(z, s)` update is the
//! KKT system
//!
//! ```text
//! [ ρI_p   0     Hᵀ  ] [z]   [ρα₁]
//! [ 0      ρI_q  −I_q ] [s] = [ρα₂]
//! [ H     −I_q   0   ] [λ]   [ h ]
//! ```
//!
//! programmed once; `w` is a soft threshold and `u` a Euclidean-ball projection.

use crate::admm::{self, AdmmConfig, AdmmOutcome, AdmmState};
use crate::crossbar::{CrossbarConfig, MappedMatrix, Programmer};
use crate::error::{Error, Result};
use crate::numerics::vector::norm2;
use crate::numerics::{LuFactorization, Matrix, SeededRng};
use crate::scalar::Real;

pub const DEFAULT_RHO: f64 = 10.0;
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CsProblem<T> {
    /// `q × p` measurement matrix `H`, `q < p`.
    pub sensing: Matrix<T>,
    /// Measurements `h`, length `q`.
    pub measurements: Vec<T>,
    /// Residual bound `ξ ≥ 0`.
    pub noise_bound: T,
}

impl<T: Real> CsProblem<T> {
    pub fn new(sensing: Matrix<T>, measurements: Vec<T>, noise_bound: T) -> Result<Self> {
        if sensing.rows() >= sensing.cols() {
            return Err(Error::WrongShape {
                expected: "q < p measurement matrix".into(),
                found: format!("{}x{}", sensing.rows(), sensing.cols()),
            });
        }
        if measurements.len() != sensing.rows() {
            return Err(Error::DimensionMismatch { expected: sensing.rows(), found: measurements.len() });
        }
        if !(noise_bound >= T::zero()) {
            return Err(Error::InvalidConfig("noise bound must be nonnegative".into()));
        }
        Ok(Self { sensing, measurements, noise_bound })
    }

    pub fn signal_dim(&self) -> usize {
        self.sensing.cols()
    }

    pub fn measurement_dim(&self) -> usize {
        self.sensing.rows()
    }
}

/// The six ADMM blocks of the splitting.
#[derive(Debug, Clone, PartialEq)]
pub struct CsState<T> {
    pub z: Vec<T>,
    pub s: Vec<T>,
    pub w: Vec<T>,
    pub u: Vec<T>,
    pub mu1: Vec<T>,
    pub mu2: Vec<T>,
}

impl<T: Real> CsState<T> {
    /// Splits a stacked engine state `x = (z, s)`, `y = (w, u)`, `μ = (μ₁, μ₂)`.
    pub fn from_admm(state: &AdmmState<T>, p: usize) -> Self {
        Self {
            z: state.x[..p].to_vec(),
            s: state.x[p..].to_vec(),
            w: state.y[..p].to_vec(),
            u: state.y[p..].to_vec(),
            mu1: state.mu[..p].to_vec(),
            mu2: state.mu[p..].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal<T> {
    pub values: Vec<T>,
    pub support: Vec<usize>,
}

impl<T: Real> SparseSignal<T> {
    pub fn new(values: Vec<T>) -> Self {
        let support = values.iter().enumerate().filter(|(_, v)| **v != T::zero()).map(|(i, _)| i).collect();
        Self { values, support }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }
}

/// `[[ρI_p, 0, Hᵀ], [0, ρI_q, −I_q], [H, −I_q, 0]]`
pub fn build_cs_kkt<T: Real>(h: &Matrix<T>, rho: T) -> Result<Matrix<T>> {
    if !(rho > T::zero()) {
        return Err(Error::InvalidConfig(format!("rho must be positive, got {rho}")));
    }
    let (q, p) = (h.rows(), h.cols());
    let mut c = Matrix::zeros(p + 2 * q, p + 2 * q);
    c.set_block(0, 0, &Matrix::scaled_identity(p, rho));
    c.set_block(0, p + q, &h.transpose());
    c.set_block(p, p, &Matrix::scaled_identity(q, rho));
    c.set_block(p, p + q, &Matrix::scaled_identity(q, -T::one()));
    c.set_block(p + q, 0, h);
    c.set_block(p + q, p, &Matrix::scaled_identity(q, -T::one()));
    Ok(c)
}

/// `(z, s)` update through the programmed KKT crossbar.
pub fn cs_x_step<T: Real>(
    xb: &MappedMatrix<T>,
    alpha1: &[T],
    alpha2: &[T],
    h: &[T],
    rho: T,
) -> Result<(Vec<T>, Vec<T>)> {
    let (p, q) = (alpha1.len(), alpha2.len());
    if h.len() != q {
        return Err(Error::DimensionMismatch { expected: q, found: h.len() });
    }
    let mut rhs: Vec<T> = alpha1.iter().chain(alpha2).map(|&a| rho * a).collect();
    rhs.extend_from_slice(h);
    let mut sol = xb.solve(&rhs)?;
    sol.truncate(p + q);
    let s = sol.split_off(p);
    Ok((sol, s))
}

/// Elementwise shrinkage `(β − τ)₊ − (−β − τ)₊`.
pub fn soft_threshold<T: Real>(beta: &[T], tau: T) -> Vec<T> {
    beta.iter().map(|&b| (b - tau).max(T::zero()) - (-b - tau).max(T::zero())).collect()
}

/// Projection onto the ball `‖u‖₂ ≤ ξ`.
pub fn project_ball<T: Real>(beta: &[T], xi: T) -> Vec<T> {
    let norm = norm2(beta);
    if norm <= xi {
        return beta.to_vec();
    }
    let factor = xi / norm;
    beta.iter().map(|&b| b * factor).collect()
}

#[derive(Debug, Clone)]
pub struct CsReport<T> {
    /// Recovered signal: the soft-thresholded `w` block.
    pub signal: Vec<T>,
    pub state: CsState<T>,
    pub outcome: AdmmOutcome<T>,
    pub programs: usize,
}

pub fn solve_cs_with<T: Real>(
    prob: &CsProblem<T>,
    cfg: &AdmmConfig<T>,
    programmer: &mut Programmer<T>,
) -> Result<CsReport<T>> {
    cfg.validate()?;
    let (p, q) = (prob.signal_dim(), prob.measurement_dim());
    let kkt = build_cs_kkt(&prob.sensing, cfg.rho)?;
    let before = programmer.programs();
    let xb = programmer.program(&kkt)?;
    let h = &prob.measurements;
    let xi = prob.noise_bound;

    let x_step = |y: &[T], mu: &[T], rho: T| -> Result<Vec<T>> {
        let alpha: Vec<T> = y.iter().zip(mu).map(|(&y, &m)| y - m / rho).collect();
        let (mut z, s) = cs_x_step(&xb, &alpha[..p], &alpha[p..], h, rho)?;
        z.extend(s);
        Ok(z)
    };
    let y_step = |x: &[T], mu: &[T], rho: T| -> Result<Vec<T>> {
        let beta: Vec<T> = x.iter().zip(mu).map(|(&x, &m)| x + m / rho).collect();
        let mut w = soft_threshold(&beta[..p], T::one() / rho);
        w.extend(project_ball(&beta[p..], xi));
        Ok(w)
    };
    let outcome = admm::run(x_step, y_step, cfg, AdmmState::zeros(p + q))?;
    let state = CsState::from_admm(&outcome.state, p);
    Ok(CsReport { signal: state.w.clone(), state, outcome, programs: programmer.programs() - before })
}

pub fn solve_cs<T: Real>(
    prob: &CsProblem<T>,
    cfg: &AdmmConfig<T>,
    variation: T,
    rng: SeededRng,
) -> Result<CsReport<T>> {
    let mut programmer = Programmer::new(CrossbarConfig::default(), variation, rng);
    solve_cs_with(prob, cfg, &mut programmer)
}

/// Orthogonal matching pursuit with `sparsity` greedy steps.
pub fn omp_baseline<T: Real>(h_mat: &Matrix<T>, h: &[T], sparsity: usize) -> Result<Vec<T>> {
    let (q, p) = (h_mat.rows(), h_mat.cols());
    if h.len() != q {
        return Err(Error::DimensionMismatch { expected: q, found: h.len() });
    }
    let mut z = vec![T::zero(); p];
    if sparsity == 0 {
        return Ok(z);
    }
    let col_norms: Vec<T> = (0..p).map(|j| norm2(&h_mat.column(j))).collect();
    let stop = T::lit(1e-12) * (T::one() + norm2(h));
    let mut active: Vec<usize> = Vec::new();
    let mut residual = h.to_vec();
    let mut coeffs: Vec<T> = Vec::new();
    for _ in 0..sparsity.min(q).min(p) {
        if norm2(&residual) <= stop {
            break;
        }
        let corr = h_mat.tr_mul_vec(&residual)?;
        let next = (0..p).filter(|j| !active.contains(j) && col_norms[*j] > T::zero()).max_by(|&a, &b| {
            (corr[a].abs() / col_norms[a])
                .partial_cmp(&(corr[b].abs() / col_norms[b]))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let Some(j) = next else { break };
        active.push(j);
        // Least-squares refit on the active set via the normal equations.
        let sub = Matrix::from_fn(q, active.len(), |i, k| h_mat[(i, active[k])]);
        let Ok(lu) = LuFactorization::new(&sub.gram()) else {
            active.pop();
            break;
        };
        coeffs = lu.solve(&sub.tr_mul_vec(h)?)?;
        let fit = sub.mul_vec(&coeffs)?;
        residual = h.iter().zip(&fit).map(|(&a, &b)| a - b).collect();
    }
    for (&j, &c) in active.iter().zip(&coeffs) {
        z[j] = c;
    }
    Ok(z)
}

/// Fraction of coordinates whose thresholded support indicator (`|zᵢ| > threshold`)
/// disagrees with the true support.
pub fn support_error<T: Real>(z: &[T], z_star: &SparseSignal<T>, threshold: T) -> T {
    let p = z_star.len();
    if p == 0 {
        return T::zero();
    }
    let mut truth = vec![false; p];
    for &i in &z_star.support {
        truth[i] = true;
    }
    let mismatches = z.iter().zip(&truth).filter(|(v, &t)| (v.abs() > threshold) != t).count();
    T::from_count(mismatches) / T::from_count(p)
}
