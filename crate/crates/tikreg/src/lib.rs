//! Solvers for sparse Tikhonov-regularized least squares
//!
//! ```text
//! minimize over x:  0.5 ||A x - b||^2 + (lambda / 2) ||x||^2 + phi(x)
//! ```
//!
//! where the penalty `phi` is an l1 norm (`mu * ||x||_1`), the indicator of
//! the nonnegative orthant, or their sum.  The ridge term makes the problem
//! strongly convex, which this crate exploits three ways:
//!
//! - [`dssn_solve`] — a semismooth Newton method on the smooth, unconstrained
//!   dual problem, with active-set-reduced Newton systems solved by a
//!   Cholesky factorization, a Sherman-Morrison-Woodbury rearrangement, or
//!   conjugate gradients ([`LinSysStrategy`]).
//! - [`pssn_solve`] — a semismooth Newton method directly on the primal
//!   fixed-point residual.
//! - [`apg_solve`] — an accelerated proximal-gradient baseline with a
//!   power-iteration step-size estimate and monotone restarts.
//!
//! Everything is generic over the scalar type through the [`Float`] trait
//! (instantiated in practice at `f64` or `f32`; the `*64` / `*32` aliases at
//! the crate root pick one).  The [`bench`] module adds warm-started
//! regularization-path protocols with CSV reporting, [`data`] reads and
//! writes LIBSVM/CSV datasets, and [`synth`] generates seeded random
//! instances.
//!
//! ```
//! use tikreg::{dssn_solve, DesignMatrix, ProblemData, Regularizer, SolverOptions};
//!
//! // minimize 0.5 (x - 1)^2 + 0.5 x^2 + 0.5 |x|
//! let a = DesignMatrix::from_rows(&[vec![1.0_f64]]).unwrap();
//! let p = ProblemData::new(a, vec![1.0], 1.0, Regularizer::L1 { mu: 0.5 }).unwrap();
//! let (x, _z, report) = dssn_solve(&p, &SolverOptions::default(), None).unwrap();
//! assert!(report.converged);
//! assert!((x[0] - 0.25).abs() < 1e-10);
//! ```

pub mod apg;
pub mod bench;
pub mod data;
pub mod dssn;
pub mod error;
pub mod float;
pub mod linalg;
pub mod linsys;
pub mod matrix;
pub mod problem;
pub mod pssn;
pub mod regularizer;
pub mod solver;
pub mod synth;

pub use apg::{apg_solve, apg_solve_warm, estimate_lipschitz, grid_oracle, LipschitzEstimate};
pub use bench::{
    emit_csv, emit_gap_trace, render_csv, render_gap_trace, run_path, PathMode, PathProtocol,
    RegFamily, RunRecord, SolverKind, CSV_HEADER, NNZ_THRESHOLD,
};
pub use data::{augment, compute_mu, load_csv, load_libsvm, write_libsvm, Dataset};
pub use dssn::{dssn_solve, dual_gradient, dual_objective, recover_primal};
pub use error::{Error, Result};
pub use float::Float;
pub use linsys::{select_strategy, solve_dual_system, solve_primal_system, CgReport, LinSysStrategy};
pub use matrix::DesignMatrix;
pub use problem::{count_nonzeros, ProblemData};
pub use pssn::pssn_solve;
pub use regularizer::{JacobianDiag, Regularizer};
pub use solver::{SolveReport, SolverOptions, StopReason};
pub use synth::{synthesize, SynthConfig};

/// Double-precision aliases for the core types.
pub type DesignMatrix64 = DesignMatrix<f64>;
pub type Problem64 = ProblemData<f64>;
pub type Regularizer64 = Regularizer<f64>;
pub type SolverOptions64 = SolverOptions<f64>;
pub type SolveReport64 = SolveReport<f64>;
pub type Dataset64 = Dataset<f64>;

/// Single-precision aliases for the core types.
pub type DesignMatrix32 = DesignMatrix<f32>;
pub type Problem32 = ProblemData<f32>;
pub type Regularizer32 = Regularizer<f32>;
pub type SolverOptions32 = SolverOptions<f32>;
pub type SolveReport32 = SolveReport<f32>;
pub type Dataset32 = Dataset<f32>;
