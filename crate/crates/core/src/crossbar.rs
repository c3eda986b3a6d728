//! Memristor crossbar simulation.
//!
//! A crossbar realizes a nonnegative square coefficient matrix `C` through its
//! conductances. Driving the word lines with `V_I` yields `V_O = C V_I` on the
//! bit lines ([`Crossbar::multiply`]); holding `V_O` and reading `V_I` solves the
//! linear system instead ([`Crossbar::solve`]). Programming happens once and
//! freezes a hardware variation `Σ`, so every later operation sees `C + Σ`.
//!
//! Signed matrices go through [`eliminate_negatives`], which embeds `C` into a
//! larger nonnegative system with one auxiliary variable per column of `C` that
//! holds a negative entry. [`MappedMatrix`] bundles the two steps.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::{gaussian_perturbation, LuFactorization, Matrix, SeededRng};
use crate::scalar::Real;

/// Nonnegative embedding `[[(C)₊, B], [D, I]]` of a signed square matrix `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSystem<T> {
    pub matrix: Matrix<T>,
    pub original_dim: usize,
    pub aux_dim: usize,
    /// Columns of `C` holding at least one negative entry, ascending.
    pub aux_columns: Vec<usize>,
}

impl<T: Real> AugmentedSystem<T> {
    pub fn dim(&self) -> usize {
        self.original_dim + self.aux_dim
    }

    /// Right-hand side `(b, 0)` for solving `C x = b` on the augmented system.
    pub fn lift_rhs(&self, b: &[T]) -> Vec<T> {
        let mut out = b.to_vec();
        out.resize(self.dim(), T::zero());
        out
    }

    /// Input `(v, -D v)` whose augmented product reproduces `C v` in its head.
    pub fn lift_input(&self, v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        out.extend(self.aux_columns.iter().map(|&j| -v[j]));
        out
    }
}

/// Builds the negative-free augmentation of `c`.
pub fn eliminate_negatives<T: Real>(c: &Matrix<T>) -> Result<AugmentedSystem<T>> {
    if !c.is_square() {
        return Err(Error::NotSquare { rows: c.rows(), cols: c.cols() });
    }
    let n = c.rows();
    let aux_columns: Vec<usize> = (0..n).filter(|&j| (0..n).any(|i| c[(i, j)] < T::zero())).collect();
    let aux_dim = aux_columns.len();
    let mut matrix = Matrix::zeros(n + aux_dim, n + aux_dim);
    for i in 0..n {
        for j in 0..n {
            matrix[(i, j)] = c[(i, j)].max(T::zero());
        }
    }
    for (k, &col) in aux_columns.iter().enumerate() {
        // B: column k is the negative part of column `col`.
        for i in 0..n {
            matrix[(i, n + k)] = (-c[(i, col)]).max(T::zero());
        }
        // D: row k of I_N selected by `col`, then the I_N̄ block.
        matrix[(n + k, col)] = T::one();
        matrix[(n + k, n + k)] = T::one();
    }
    Ok(AugmentedSystem { matrix, original_dim: n, aux_dim, aux_columns })
}

/// Device parameters shared by every crossbar a solver programs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossbarConfig {
    pub g_min: f64,
    pub g_max: f64,
    /// Bit-line sense conductance `g_s`.
    pub sense_conductance: f64,
}

impl Default for CrossbarConfig {
    fn default() -> Self {
        Self { g_min: 1e-6, g_max: 1e-3, sense_conductance: 1e-3 }
    }
}

/// Affine prescaling `g = offset + multiplier · c` from coefficients to conductances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductanceScale<T> {
    pub multiplier: T,
    pub offset: T,
}

impl<T: Real> ConductanceScale<T> {
    pub fn encode(&self, c: T) -> T {
        self.offset + self.multiplier * c
    }

    pub fn decode(&self, g: T) -> T {
        (g - self.offset) / self.multiplier
    }
}

/// A programmed crossbar. Immutable after [`Crossbar::program`].
#[derive(Debug, Clone)]
pub struct Crossbar<T> {
    conductances: Matrix<T>,
    sense_conductance: T,
    scale: ConductanceScale<T>,
    effective: Matrix<T>,
    variation_ratio: T,
    factorization: std::result::Result<LuFactorization<T>, usize>,
}

impl<T: Real> Crossbar<T> {
    /// Programs `c` (nonnegative, square) once, drawing and freezing a variation
    /// of Frobenius ratio `variation_ratio`.
    pub fn program(c: &Matrix<T>, variation_ratio: T, rng: &mut SeededRng, config: &CrossbarConfig) -> Result<Self> {
        if !(config.g_min < config.g_max) || config.g_min < 0.0 {
            return Err(Error::InvalidRange { g_min: config.g_min, g_max: config.g_max });
        }
        if !c.is_square() {
            return Err(Error::NotSquare { rows: c.rows(), cols: c.cols() });
        }
        if !(variation_ratio >= T::zero()) {
            return Err(Error::InvalidConfig("variation ratio must be nonnegative".into()));
        }
        let n = c.rows();
        for i in 0..n {
            for j in 0..n {
                if c[(i, j)] < T::zero() {
                    return Err(Error::NegativeEntry { row: i, col: j });
                }
            }
        }
        let (g_min, g_max) = (T::lit(config.g_min), T::lit(config.g_max));
        let peak = c.max_abs();
        let multiplier = if peak > T::zero() { (g_max - g_min) / peak } else { g_max - g_min };
        let scale = ConductanceScale { multiplier, offset: g_min };
        let conductances = c.map(|v| scale.encode(v).min(g_max).max(g_min));

        let sigma = gaussian_perturbation(c, variation_ratio, rng);
        let effective = c.add(&sigma)?;
        let factorization = match LuFactorization::new(&effective) {
            Ok(lu) => Ok(lu),
            Err(Error::SingularMatrix { pivot_index }) => Err(pivot_index),
            Err(e) => return Err(e),
        };
        Ok(Self {
            conductances,
            sense_conductance: T::lit(config.sense_conductance),
            scale,
            effective,
            variation_ratio,
            factorization,
        })
    }

    pub fn dim(&self) -> usize {
        self.effective.rows()
    }

    pub fn conductances(&self) -> &Matrix<T> {
        &self.conductances
    }

    pub fn sense_conductance(&self) -> T {
        self.sense_conductance
    }

    pub fn scale(&self) -> ConductanceScale<T> {
        self.scale
    }

    /// The perturbed coefficient matrix `C + Σ` every operation actually uses.
    pub fn effective_matrix(&self) -> &Matrix<T> {
        &self.effective
    }

    pub fn variation_ratio(&self) -> T {
        self.variation_ratio
    }

    /// Coefficients read back from the stored conductances (variation-free).
    pub fn decoded_coefficients(&self) -> Matrix<T> {
        self.conductances.map(|g| self.scale.decode(g))
    }

    /// Forward analog multiply `V_O = (C + Σ) V_I`.
    pub fn multiply(&self, v_in: &[T]) -> Result<Vec<T>> {
        self.effective.mul_vec(v_in)
    }

    /// Reverse operation: finds `V_I` with `(C + Σ) V_I = V_O`.
    pub fn solve(&self, v_out: &[T]) -> Result<Vec<T>> {
        if v_out.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v_out.len() });
        }
        match &self.factorization {
            Ok(lu) => lu.solve(v_out),
            Err(pivot_index) => Err(Error::SingularMatrix { pivot_index: *pivot_index }),
        }
    }
}

/// A signed square matrix realized on one crossbar through its nonnegative augmentation.
///
/// Repeated solves against the same array are linear in the right side, so after
/// `dim` solves the map `b ↦ head((C + Σ)⁻¹ (b, 0))` is tabulated once and applied
/// as a dense product.
#[derive(Debug)]
pub struct MappedMatrix<T> {
    system: AugmentedSystem<T>,
    crossbar: Crossbar<T>,
    solves: AtomicUsize,
    readout: OnceLock<Matrix<T>>,
}

impl<T: Clone> Clone for MappedMatrix<T> {
    fn clone(&self) -> Self {
        Self {
            system: self.system.clone(),
            crossbar: self.crossbar.clone(),
            solves: AtomicUsize::new(self.solves.load(Ordering::Relaxed)),
            readout: self.readout.clone(),
        }
    }
}

impl<T: Real> MappedMatrix<T> {
    pub fn program(c: &Matrix<T>, variation_ratio: T, rng: &mut SeededRng, config: &CrossbarConfig) -> Result<Self> {
        let system = eliminate_negatives(c)?;
        let crossbar = Crossbar::program(&system.matrix, variation_ratio, rng, config)?;
        Ok(Self { system, crossbar, solves: AtomicUsize::new(0), readout: OnceLock::new() })
    }

    /// Dimension of the original (unaugmented) matrix.
    pub fn dim(&self) -> usize {
        self.system.original_dim
    }

    pub fn system(&self) -> &AugmentedSystem<T> {
        &self.system
    }

    pub fn crossbar(&self) -> &Crossbar<T> {
        &self.crossbar
    }

    /// `C v` through the augmented crossbar: input `(v, -D v)`, head of the output.
    pub fn multiply(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        let mut out = self.crossbar.multiply(&self.system.lift_input(v))?;
        out.truncate(self.dim());
        Ok(out)
    }

    /// Solves `C x = b` through the augmented crossbar and drops the auxiliary block.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: b.len() });
        }
        if let Some(r) = self.readout.get() {
            return Ok(r.mul_vec_unchecked(b));
        }
        if self.solves.fetch_add(1, Ordering::Relaxed) + 1 >= self.dim() {
            let r = self.tabulate()?;
            let _ = self.readout.set(r);
            return Ok(self.readout.get().expect("readout set").mul_vec_unchecked(b));
        }
        self.solve_direct(b)
    }

    fn solve_direct(&self, b: &[T]) -> Result<Vec<T>> {
        let mut x = self.crossbar.solve(&self.system.lift_rhs(b))?;
        x.truncate(self.dim());
        Ok(x)
    }

    fn tabulate(&self) -> Result<Matrix<T>> {
        let n = self.dim();
        let mut columns = Vec::with_capacity(n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            columns.push(self.solve_direct(&e)?);
            e[j] = T::zero();
        }
        Matrix::from_columns(&columns)
    }
}

/// Programs crossbars for a solver run and counts how many it has written.
#[derive(Debug, Clone)]
pub struct Programmer<T> {
    config: CrossbarConfig,
    variation_ratio: T,
    rng: SeededRng,
    programs: usize,
}

impl<T: Real> Programmer<T> {
    pub fn new(config: CrossbarConfig, variation_ratio: T, rng: SeededRng) -> Self {
        Self { config, variation_ratio, rng, programs: 0 }
    }

    pub fn program(&mut self, c: &Matrix<T>) -> Result<MappedMatrix<T>> {
        let mapped = MappedMatrix::program(c, self.variation_ratio, &mut self.rng, &self.config)?;
        self.programs += 1;
        Ok(mapped)
    }

    /// Number of successful programming operations so far.
    pub fn programs(&self) -> usize {
        self.programs
    }

    pub fn variation_ratio(&self) -> T {
        self.variation_ratio
    }

    pub fn rng_mut(&mut self) -> &mut SeededRng {
        &mut self.rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{direct_solve, frobenius_norm};

    fn m(rows: &[Vec<f64>]) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn nonnegative_matrix_is_unchanged() {
        let c = m(&[vec![1.0, 0.0], vec![3.0, 4.0]]);
        let aug = eliminate_negatives(&c).unwrap();
        assert_eq!(aug.aux_dim, 0);
        assert_eq!(aug.matrix, c);
    }

    #[test]
    fn single_negative_column() {
        let c = m(&[vec![1.0, -2.0], vec![3.0, 4.0]]);
        let aug = eliminate_negatives(&c).unwrap();
        assert_eq!(aug.aux_dim, 1);
        assert_eq!(aug.aux_columns, vec![1]);
        assert_eq!(aug.matrix, m(&[vec![1.0, 0.0, 2.0], vec![3.0, 4.0, 0.0], vec![0.0, 1.0, 1.0]]));
        // Eliminating V̄ = -D V_I reproduces C V_I.
        let v = [0.7, -1.3];
        let full = aug.matrix.mul_vec(&aug.lift_input(&v)).unwrap();
        let direct = c.mul_vec(&v).unwrap();
        assert!((full[0] - direct[0]).abs() < 1e-15 && (full[1] - direct[1]).abs() < 1e-15);
        assert_eq!(full[2], 0.0);
    }

    #[test]
    fn negative_identity() {
        let c = Matrix::<f64>::identity(2).scale(-1.0);
        let aug = eliminate_negatives(&c).unwrap();
        assert_eq!(aug.aux_dim, 2);
        assert_eq!(aug.dim(), 4);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(aug.matrix[(i, j)], 0.0);
            }
        }
        let x = direct_solve(&aug.matrix, &aug.lift_rhs(&[1.0, 2.0])).unwrap();
        assert!((x[0] + 1.0).abs() < 1e-14 && (x[1] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn program_identity_without_variation() {
        let xb =
            Crossbar::program(&Matrix::identity(2), 0.0, &mut SeededRng::new(1), &CrossbarConfig::default()).unwrap();
        assert_eq!(xb.effective_matrix(), &Matrix::identity(2));
        assert_eq!(xb.solve(&[5.0, 6.0]).unwrap(), vec![5.0, 6.0]);
        assert_eq!(xb.multiply(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        let decoded = xb.decoded_coefficients();
        assert!(decoded.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-12);
        let cfg = CrossbarConfig::default();
        assert!(xb.conductances().as_slice().iter().all(|&g| g >= cfg.g_min && g <= cfg.g_max));
    }

    #[test]
    fn program_realizes_variation_ratio() {
        let c = m(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let xb = Crossbar::program(&c, 0.1, &mut SeededRng::new(3), &CrossbarConfig::default()).unwrap();
        let ratio = frobenius_norm(&xb.effective_matrix().sub(&c).unwrap()) / frobenius_norm(&c);
        assert!((ratio - 0.1).abs() <= 1e-12);
    }

    #[test]
    fn program_is_deterministic() {
        let c = m(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let cfg = CrossbarConfig::default();
        let a = Crossbar::program(&c, 0.05, &mut SeededRng::new(8), &cfg).unwrap();
        let b = Crossbar::program(&c, 0.05, &mut SeededRng::new(8), &cfg).unwrap();
        assert_eq!(a.effective_matrix(), b.effective_matrix());
        assert_eq!(a.conductances(), b.conductances());
    }

    #[test]
    fn multiply_examples() {
        let cfg = CrossbarConfig::default();
        let xb = Crossbar::program(&m(&[vec![1.0, 2.0], vec![3.0, 4.0]]), 0.0, &mut SeededRng::new(0), &cfg).unwrap();
        assert_eq!(xb.multiply(&[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
        assert_eq!(xb.multiply(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(xb.multiply(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn program_errors() {
        let cfg = CrossbarConfig { g_min: 1e-3, g_max: 1e-3, ..CrossbarConfig::default() };
        assert!(matches!(
            Crossbar::program(&Matrix::<f64>::identity(2), 0.0, &mut SeededRng::new(0), &cfg),
            Err(Error::InvalidRange { .. })
        ));
        let neg = m(&[vec![1.0, -1.0], vec![0.0, 1.0]]);
        assert!(matches!(
            Crossbar::program(&neg, 0.0, &mut SeededRng::new(0), &CrossbarConfig::default()),
            Err(Error::NegativeEntry { row: 0, col: 1 })
        ));
    }

    #[test]
    fn singular_program_fails_on_solve() {
        let c = m(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let xb = Crossbar::program(&c, 0.0, &mut SeededRng::new(0), &CrossbarConfig::default()).unwrap();
        assert!(matches!(xb.solve(&[1.0, 1.0]), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn mapped_matrix_round_trip() {
        let c = m(&[vec![2.0, -1.0, 0.5], vec![-1.0, 3.0, 0.0], vec![0.0, 1.0, -4.0]]);
        let mapped = MappedMatrix::program(&c, 0.0, &mut SeededRng::new(1), &CrossbarConfig::default()).unwrap();
        let v = [1.0, -2.0, 0.25];
        let y = mapped.multiply(&v).unwrap();
        let direct = c.mul_vec(&v).unwrap();
        for (a, b) in y.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-14);
        }
        let back = mapped.solve(&y).unwrap();
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn programmer_counts() {
        let mut p = Programmer::new(CrossbarConfig::default(), 0.0, SeededRng::new(0));
        p.program(&Matrix::<f64>::identity(2)).unwrap();
        p.program(&Matrix::<f64>::identity(3)).unwrap();
        assert_eq!(p.programs(), 2);
    }
}
