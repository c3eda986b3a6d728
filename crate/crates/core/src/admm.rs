//! ADMM engine for the consensus splitting `x = y`.
//!
//! Every solver in this crate is cast as
//! `minimize f(x) + g(y) subject to x − y = 0`, so one iteration is
//!
//! ```text
//! x⁺ = x_step(y, μ, ρ)
//! y⁺ = y_step(x⁺, μ, ρ)
//! μ⁺ = μ + ρ (x⁺ − y⁺)
//! ```
//!
//! and the run stops once `‖x − y‖₂ ≤ ε` and `‖x − x_prev‖₂ ≤ ε`.

use crate::error::{Error, Result};
use crate::numerics::vector::{all_finite, dist2, norm2};
use crate::scalar::Real;

pub const DEFAULT_MAX_ITERATIONS: usize = 50_000;
/// An iterate norm `‖x‖₂` or primal residual `‖x − y‖₂` above this ends the run
/// as diverged.
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmConfig<T> {
    pub rho: T,
    pub epsilon: T,
    pub max_iterations: usize,
    pub divergence_bound: T,
}

impl<T: Real> Default for AdmmConfig<T> {
    fn default() -> Self {
        Self::new(T::one(), T::lit(1e-3), DEFAULT_MAX_ITERATIONS)
    }
}

impl<T: Real> AdmmConfig<T> {
    pub fn new(rho: T, epsilon: T, max_iterations: usize) -> Self {
        Self { rho, epsilon, max_iterations, divergence_bound: T::lit(DEFAULT_DIVERGENCE_BOUND) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > T::zero()) {
            return Err(Error::InvalidConfig(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.epsilon > T::zero()) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.divergence_bound > T::zero()) {
            return Err(Error::InvalidConfig("divergence bound must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub mu: Vec<T>,
    pub k: usize,
    pub prev_x: Vec<T>,
}

impl<T: Real> AdmmState<T> {
    /// `x⁰ = y⁰ = μ⁰ = 0`.
    pub fn zeros(dim: usize) -> Self {
        let z = vec![T::zero(); dim];
        Self { x: z.clone(), y: z.clone(), mu: z.clone(), k: 0, prev_x: z }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn primal_residual(&self) -> T {
        dist2(&self.x, &self.y)
    }

    pub fn step_residual(&self) -> T {
        dist2(&self.x, &self.prev_x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals<T> {
    /// `‖x − y‖₂`
    pub primal: T,
    /// `‖x^k − x^{k−1}‖₂`
    pub step: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    /// An iterate became non-finite.
    Diverged,
}

#[derive(Debug, Clone)]
pub struct AdmmOutcome<T> {
    pub state: AdmmState<T>,
    pub converged: bool,
    pub termination: Termination,
    pub iterations_used: usize,
    pub residual_trace: Vec<Residuals<T>>,
}

/// Snapshot handed to observers after each completed iteration.
#[derive(Debug)]
pub struct IterationView<'a, T> {
    pub k: usize,
    pub x: &'a [T],
    pub y: &'a [T],
    pub mu_prev: &'a [T],
    pub mu: &'a [T],
    pub rho: T,
}

/// `true` iff `‖x − y‖₂ ≤ ε` and `‖x − x_prev‖₂ ≤ ε`.
pub fn check_convergence<T: Real>(state: &AdmmState<T>, epsilon: T) -> bool {
    state.primal_residual() <= epsilon && state.step_residual() <= epsilon
}

pub fn run<T, X, Y>(x_step: X, y_step: Y, config: &AdmmConfig<T>, init: AdmmState<T>) -> Result<AdmmOutcome<T>>
where
    T: Real,
    X: FnMut(&[T], &[T], T) -> Result<Vec<T>>,
    Y: FnMut(&[T], &[T], T) -> Result<Vec<T>>,
{
    run_observed(x_step, y_step, config, init, |_| {})
}

/// [`run`] with a callback invoked after every iteration.
pub fn run_observed<T, X, Y, O>(
    mut x_step: X,
    mut y_step: Y,
    config: &AdmmConfig<T>,
    init: AdmmState<T>,
    mut observer: O,
) -> Result<AdmmOutcome<T>>
where
    T: Real,
    X: FnMut(&[T], &[T], T) -> Result<Vec<T>>,
    Y: FnMut(&[T], &[T], T) -> Result<Vec<T>>,
    O: FnMut(&IterationView<'_, T>),
{
    config.validate()?;
    let dim = init.dim();
    if init.y.len() != dim || init.mu.len() != dim || init.prev_x.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: init.y.len().min(init.mu.len()) });
    }
    let rho = config.rho;
    let mut state = init;
    let mut trace = Vec::new();
    let mut termination = Termination::MaxIterations;

    for _ in 0..config.max_iterations {
        let x_new = x_step(&state.y, &state.mu, rho)?;
        check_len(dim, &x_new)?;
        let y_new = y_step(&x_new, &state.mu, rho)?;
        check_len(dim, &y_new)?;
        let mu_new: Vec<T> =
            state.mu.iter().zip(x_new.iter().zip(&y_new)).map(|(&m, (&x, &y))| m + rho * (x - y)).collect();

        observer(&IterationView { k: state.k + 1, x: &x_new, y: &y_new, mu_prev: &state.mu, mu: &mu_new, rho });

        state.prev_x = std::mem::replace(&mut state.x, x_new);
        state.y = y_new;
        state.mu = mu_new;
        state.k += 1;

        let res = Residuals { primal: state.primal_residual(), step: state.step_residual() };
        trace.push(res);

        let finite = all_finite(&state.x) && all_finite(&state.y) && all_finite(&state.mu);
        if !finite || res.primal > config.divergence_bound || norm2(&state.x) > config.divergence_bound {
            termination = Termination::Diverged;
            break;
        }
        if check_convergence(&state, config.epsilon) {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(AdmmOutcome {
        iterations_used: trace.len(),
        converged: termination == Termination::Converged,
        termination,
        state,
        residual_trace: trace,
    })
}

fn check_len<T>(dim: usize, v: &[T]) -> Result<()> {
    if v.len() == dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: dim, found: v.len() })
    }
}
