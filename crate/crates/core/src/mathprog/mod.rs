//! Crossbar-backed LP and SOCP solvers.
//!
//! Both problems share the standard form `minimize dᵀx s.t. G x = h, x ∈ K`
//! with `K` the nonnegative orthant (LP) or the second-order cone
//! `‖x_{1:n−1}‖₂ ≤ x_n` (SOCP). The ADMM x-step is the equality-constrained
//! projection of `α = y − (μ + d)/ρ`, obtained from the KKT system
//!
//! ```text
//! [ ρI  Gᵀ ] [x]   [ρα]
//! [ G   0  ] [λ] = [ h]
//! ```
//!
//! whose matrix does not depend on the iteration, so it is programmed into a
//! crossbar once per solve. The y-step is a closed-form projection onto `K`.

pub mod reference;

use crate::admm::{self, AdmmConfig, AdmmOutcome, AdmmState};
use crate::crossbar::{CrossbarConfig, MappedMatrix, Programmer};
use crate::error::{Error, Result};
use crate::numerics::vector::{dist2, norm2};
use crate::numerics::{sym_eigenvalues, Matrix, SeededRng};
use crate::scalar::Real;

/// Smallest-to-largest eigenvalue ratio of `G Gᵀ` below which `G` is rank deficient.
pub const RANK_RATIO_TOLERANCE: f64 = 1e-10;

/// `minimize dᵀx  s.t.  G x = h, x ≥ 0`
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<T> {
    pub cost: Vec<T>,
    pub eq_matrix: Matrix<T>,
    pub eq_rhs: Vec<T>,
}

/// `minimize dᵀx  s.t.  G x = h, ‖x_{1:n−1}‖₂ ≤ x_n`
#[derive(Debug, Clone, PartialEq)]
pub struct SocpProblem<T> {
    pub cost: Vec<T>,
    pub eq_matrix: Matrix<T>,
    pub eq_rhs: Vec<T>,
}

fn check_dims<T: Real>(cost: &[T], g: &Matrix<T>, h: &[T]) -> Result<()> {
    let n = cost.len();
    if g.cols() != n && g.rows() > 0 {
        return Err(Error::DimensionMismatch { expected: n, found: g.cols() });
    }
    if g.rows() != h.len() {
        return Err(Error::DimensionMismatch { expected: g.rows(), found: h.len() });
    }
    if g.rows() > n {
        return Err(Error::WrongShape { expected: format!("at most {n} equality rows"), found: g.rows().to_string() });
    }
    Ok(())
}

impl<T: Real> LpProblem<T> {
    pub fn new(cost: Vec<T>, eq_matrix: Matrix<T>, eq_rhs: Vec<T>) -> Result<Self> {
        check_dims(&cost, &eq_matrix, &eq_rhs)?;
        Ok(Self { cost, eq_matrix, eq_rhs })
    }

    pub fn dim(&self) -> usize {
        self.cost.len()
    }

    pub fn objective(&self, x: &[T]) -> T {
        crate::numerics::vector::dot(&self.cost, x)
    }
}

impl<T: Real> SocpProblem<T> {
    pub fn new(cost: Vec<T>, eq_matrix: Matrix<T>, eq_rhs: Vec<T>) -> Result<Self> {
        if cost.len() < 2 {
            return Err(Error::WrongShape { expected: "n >= 2".into(), found: cost.len().to_string() });
        }
        check_dims(&cost, &eq_matrix, &eq_rhs)?;
        Ok(Self { cost, eq_matrix, eq_rhs })
    }

    pub fn dim(&self) -> usize {
        self.cost.len()
    }

    pub fn objective(&self, x: &[T]) -> T {
        crate::numerics::vector::dot(&self.cost, x)
    }
}

/// The iteration-independent KKT matrix `[[ρI, Gᵀ], [G, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KktSystem<T> {
    pub matrix: Matrix<T>,
    pub rho_used: T,
}

/// Checks that `G` has full row rank through the spectrum of `G Gᵀ`.
pub fn check_full_row_rank<T: Real>(g: &Matrix<T>) -> Result<()> {
    if g.rows() == 0 {
        return Ok(());
    }
    let ggt = g.transpose().gram();
    let eig = sym_eigenvalues(&ggt)?;
    let largest = eig[0];
    let smallest = *eig.last().expect("nonempty spectrum");
    let ratio = if largest > T::zero() { smallest / largest } else { T::zero() };
    if ratio > T::lit(RANK_RATIO_TOLERANCE) {
        Ok(())
    } else {
        Err(Error::RankDeficient { ratio: ratio.to_f64_lossy() })
    }
}

/// KKT matrix for the equality projection with constraint matrix `g`.
/// With no equality rows this is just `ρI_n`.
pub fn build_kkt<T: Real>(g: &Matrix<T>, n: usize, rho: T) -> Result<KktSystem<T>> {
    if !(rho > T::zero()) {
        return Err(Error::InvalidConfig(format!("rho must be positive, got {rho}")));
    }
    check_full_row_rank(g)?;
    let l = g.rows();
    let mut matrix = Matrix::zeros(n + l, n + l);
    matrix.set_block(0, 0, &Matrix::scaled_identity(n, rho));
    if l > 0 {
        matrix.set_block(0, n, &g.transpose());
        matrix.set_block(n, 0, g);
    }
    Ok(KktSystem { matrix, rho_used: rho })
}

pub fn build_lp_kkt<T: Real>(p: &LpProblem<T>, rho: T) -> Result<KktSystem<T>> {
    build_kkt(&p.eq_matrix, p.dim(), rho)
}

pub fn build_socp_kkt<T: Real>(p: &SocpProblem<T>, rho: T) -> Result<KktSystem<T>> {
    build_kkt(&p.eq_matrix, p.dim(), rho)
}

/// Solves the programmed KKT system for right side `(ρα, h)`, returning `(x, λ)`.
pub fn kkt_solve<T: Real>(xb: &MappedMatrix<T>, alpha: &[T], h: &[T], rho: T) -> Result<(Vec<T>, Vec<T>)> {
    let n = alpha.len();
    if xb.dim() != n + h.len() {
        return Err(Error::DimensionMismatch { expected: xb.dim(), found: n + h.len() });
    }
    let mut rhs: Vec<T> = alpha.iter().map(|&a| rho * a).collect();
    rhs.extend_from_slice(h);
    let mut sol = xb.solve(&rhs)?;
    let lambda = sol.split_off(n);
    Ok((sol, lambda))
}

/// x-update: projection of `alpha` onto `{x : G x = h}` through the crossbar.
pub fn lp_x_step<T: Real>(xb: &MappedMatrix<T>, alpha: &[T], h: &[T], rho: T) -> Result<Vec<T>> {
    Ok(kkt_solve(xb, alpha, h, rho)?.0)
}

/// Projection onto the nonnegative orthant.
pub fn project_nonneg<T: Real>(beta: &[T]) -> Vec<T> {
    beta.iter().map(|&b| b.max(T::zero())).collect()
}

/// Projection onto the second-order cone `‖y_{1:n−1}‖₂ ≤ y_n`.
pub fn project_soc<T: Real>(beta: &[T]) -> Vec<T> {
    assert!(beta.len() >= 2, "second-order cone needs dimension >= 2");
    let (head, tail) = beta.split_at(beta.len() - 1);
    let t = tail[0];
    let norm = norm2(head);
    if norm <= t {
        return beta.to_vec();
    }
    if norm <= -t {
        return vec![T::zero(); beta.len()];
    }
    let factor = T::lit(0.5) * (T::one() + t / norm);
    let mut out: Vec<T> = head.iter().map(|&v| factor * v).collect();
    out.push(factor * norm);
    out
}

/// Result of a crossbar-backed solve.
#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    /// Final x iterate.
    pub x: Vec<T>,
    /// KKT multiplier `λ` from the last x-step.
    pub multiplier: Vec<T>,
    pub outcome: AdmmOutcome<T>,
    /// Number of crossbar programming operations performed.
    pub programs: usize,
}

#[derive(Clone, Copy)]
enum Cone {
    NonNegative,
    SecondOrder,
}

fn solve_cone<T: Real>(
    cost: &[T],
    g: &Matrix<T>,
    h: &[T],
    cone: Cone,
    cfg: &AdmmConfig<T>,
    programmer: &mut Programmer<T>,
) -> Result<SolveReport<T>> {
    cfg.validate()?;
    let n = cost.len();
    let kkt = build_kkt(g, n, cfg.rho)?;
    let before = programmer.programs();
    let xb = programmer.program(&kkt.matrix)?;
    let mut multiplier = vec![T::zero(); h.len()];

    let x_step = |y: &[T], mu: &[T], rho: T| -> Result<Vec<T>> {
        let alpha: Vec<T> = y.iter().zip(mu).zip(cost).map(|((&y, &m), &d)| y - (m + d) / rho).collect();
        let (x, lambda) = kkt_solve(&xb, &alpha, h, rho)?;
        multiplier = lambda;
        Ok(x)
    };
    let y_step = |x: &[T], mu: &[T], rho: T| -> Result<Vec<T>> {
        let beta: Vec<T> = x.iter().zip(mu).map(|(&x, &m)| x + m / rho).collect();
        Ok(match cone {
            Cone::NonNegative => project_nonneg(&beta),
            Cone::SecondOrder => project_soc(&beta),
        })
    };
    let outcome = admm::run(x_step, y_step, cfg, AdmmState::zeros(n))?;
    Ok(SolveReport { x: outcome.state.x.clone(), multiplier, outcome, programs: programmer.programs() - before })
}

pub fn solve_lp_with<T: Real>(
    p: &LpProblem<T>,
    cfg: &AdmmConfig<T>,
    programmer: &mut Programmer<T>,
) -> Result<SolveReport<T>> {
    solve_cone(&p.cost, &p.eq_matrix, &p.eq_rhs, Cone::NonNegative, cfg, programmer)
}

pub fn solve_socp_with<T: Real>(
    p: &SocpProblem<T>,
    cfg: &AdmmConfig<T>,
    programmer: &mut Programmer<T>,
) -> Result<SolveReport<T>> {
    solve_cone(&p.cost, &p.eq_matrix, &p.eq_rhs, Cone::SecondOrder, cfg, programmer)
}

/// Solves an LP on a crossbar with the default device configuration and
/// hardware variation `variation` (Frobenius ratio).
pub fn solve_lp<T: Real>(
    p: &LpProblem<T>,
    cfg: &AdmmConfig<T>,
    variation: T,
    rng: SeededRng,
) -> Result<SolveReport<T>> {
    let mut programmer = Programmer::new(CrossbarConfig::default(), variation, rng);
    solve_lp_with(p, cfg, &mut programmer)
}

pub fn solve_socp<T: Real>(
    p: &SocpProblem<T>,
    cfg: &AdmmConfig<T>,
    variation: T,
    rng: SeededRng,
) -> Result<SolveReport<T>> {
    let mut programmer = Programmer::new(CrossbarConfig::default(), variation, rng);
    solve_socp_with(p, cfg, &mut programmer)
}

/// KKT residuals of the final iterate: `(‖ρ(x − α) + Gᵀλ‖₂, ‖G x − h‖₂)` with
/// `α = y − (μ + d)/ρ` taken from the final state.
pub fn kkt_residuals<T: Real>(cost: &[T], g: &Matrix<T>, h: &[T], report: &SolveReport<T>, rho: T) -> (T, T) {
    let st = &report.outcome.state;
    let alpha: Vec<T> = st.y.iter().zip(&st.mu).zip(cost).map(|((&y, &m), &d)| y - (m + d) / rho).collect();
    let gt_lambda = if g.rows() > 0 {
        g.tr_mul_vec(&report.multiplier).expect("multiplier matches rows")
    } else {
        vec![T::zero(); cost.len()]
    };
    let stationarity: Vec<T> =
        report.x.iter().zip(&alpha).zip(&gt_lambda).map(|((&x, &a), &gl)| rho * (x - a) + gl).collect();
    let feasibility = if g.rows() > 0 { dist2(&g.mul_vec(&report.x).expect("dims"), h) } else { T::zero() };
    (norm2(&stationarity), feasibility)
}
