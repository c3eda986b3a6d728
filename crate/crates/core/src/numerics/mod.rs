//! Dense linear algebra and randomness utilities.

pub mod jacobi;
pub mod lu;
pub mod matrix;
pub mod rng;
pub mod vector;

pub use jacobi::{sym_eig_oracle, sym_eigenvalues, EigenPair};
pub use lu::{direct_solve, LuFactorization};
pub use matrix::{frobenius_norm, Matrix};
pub use rng::{gaussian_perturbation, mix_seed, SeededRng};
