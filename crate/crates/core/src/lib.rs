//! Memristor crossbar simulator with ADMM-based LP, SOCP and compressive-sensing
//! solvers, a generalized power-iteration eigensolver and PCA.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64` (and `f32` with a `32` suffix).

pub mod admm;
pub mod crossbar;
pub mod cs;
pub mod eigen;
pub mod error;
pub mod harness;
pub mod mathprog;
pub mod numerics;
pub mod pca;
pub mod scalar;

pub use admm::{AdmmConfig, AdmmOutcome, AdmmState, Termination};
pub use crossbar::{eliminate_negatives, AugmentedSystem, Crossbar, CrossbarConfig, MappedMatrix, Programmer};
pub use cs::{omp_baseline, solve_cs, support_error, CsProblem, CsReport, SparseSignal};
pub use eigen::{top_k_eigen, DominantEigenspace, EigenDecomposition, PiConfig};
pub use error::{Error, Result};
pub use mathprog::{solve_lp, solve_socp, LpProblem, SocpProblem, SolveReport};
pub use numerics::{Matrix, SeededRng};
pub use pca::{load_iris, pca, Dataset, PcaOptions, PcaResult};
pub use scalar::Real;

pub type DenseMatrix = Matrix<f64>;
pub type DenseMatrix32 = Matrix<f32>;
pub type Vector = Vec<f64>;
pub type Vector32 = Vec<f32>;
pub type CrossbarArray = Crossbar<f64>;
pub type CrossbarArray32 = Crossbar<f32>;
pub type MappedArray = MappedMatrix<f64>;
pub type MappedArray32 = MappedMatrix<f32>;
pub type Lp = LpProblem<f64>;
pub type Lp32 = LpProblem<f32>;
pub type Socp = SocpProblem<f64>;
pub type Socp32 = SocpProblem<f32>;
pub type Cs = CsProblem<f64>;
pub type Cs32 = CsProblem<f32>;
pub type Admm = AdmmConfig<f64>;
pub type Admm32 = AdmmConfig<f32>;
pub type Pi = PiConfig<f64>;
pub type Pi32 = PiConfig<f32>;
