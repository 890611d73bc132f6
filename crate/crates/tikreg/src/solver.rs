//! Options and reporting shared by all three solvers.

use crate::float::{cast, Float};
use crate::linsys::LinSysStrategy;

/// Why a solver stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// The optimality measure reached the requested tolerance.
    Converged,
    /// The iteration cap was exhausted first.
    MaxIterations,
    /// Backtracking could not find sufficient decrease (primal Newton only).
    LineSearchFailure,
}

/// Tuning knobs for the Newton solvers.  `Default` gives the standard
/// configuration used throughout the benchmarks.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions<F> {
    /// Armijo sufficient-decrease fraction (default `1e-4`).
    pub sufficient_decrease: F,
    /// Backtracking step shrink factor in `(0, 1)` (default `0.5`).
    pub backtrack: F,
    /// Ceiling on the inexact-solve tolerance for CG (default `0.1`).
    pub cg_tol_cap: F,
    /// Exponent in the inexact-solve tolerance `min(cap, ||g||^(1+power))`
    /// (default `0.5`).
    pub cg_tol_power: F,
    /// Stopping tolerance on the optimality measure (default `1e-6`).
    pub eps: F,
    /// Newton iteration cap (default `200`).
    pub max_iter: usize,
    /// Line-search backtrack cap per iteration (default `50`).
    pub max_backtracks: usize,
    /// Linear-system backend (default `Auto`).
    pub strategy: LinSysStrategy,
}

impl<F: Float> Default for SolverOptions<F> {
    fn default() -> Self {
        SolverOptions {
            sufficient_decrease: cast(1e-4),
            backtrack: cast(0.5),
            cg_tol_cap: cast(0.1),
            cg_tol_power: cast(0.5),
            eps: cast(1e-6),
            max_iter: 200,
            max_backtracks: 50,
            strategy: LinSysStrategy::Auto,
        }
    }
}

impl<F: Float> SolverOptions<F> {
    /// Inexact-solve tolerance for the Newton system at gradient norm `gnorm`:
    /// `min(cg_tol_cap, gnorm^(1 + cg_tol_power))`.
    pub fn newton_system_tol(&self, gnorm: F) -> F {
        self.cg_tol_cap.min(gnorm.powf(F::one() + self.cg_tol_power))
    }
}

/// Per-solve diagnostics.  The `*_history` vectors hold one entry per visited
/// iterate (so `iterations + 1` entries), while `step_sizes` and
/// `active_set_sizes` hold one entry per accepted step.
#[derive(Clone, Debug)]
pub struct SolveReport<F> {
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
    /// Optimality measure at each visited iterate.
    pub eta_history: Vec<F>,
    /// Primal objective at each visited iterate.
    pub objective_history: Vec<F>,
    /// Duality gap `f(x) + h(z)` at each visited iterate (dual solver only).
    pub gap_history: Vec<F>,
    /// Accepted line-search step length per iteration.
    pub step_sizes: Vec<F>,
    /// Active-set size used for each Newton system.
    pub active_set_sizes: Vec<usize>,
    /// Wall-clock time of the solve, in seconds.
    pub wall_time: f64,
}

impl<F: Float> SolveReport<F> {
    pub(crate) fn new() -> Self {
        SolveReport {
            iterations: 0,
            converged: false,
            stop: StopReason::MaxIterations,
            eta_history: Vec::new(),
            objective_history: Vec::new(),
            gap_history: Vec::new(),
            step_sizes: Vec::new(),
            active_set_sizes: Vec::new(),
            wall_time: 0.0,
        }
    }

    /// Final optimality measure (the last recorded entry).
    pub fn final_eta(&self) -> Option<F> {
        self.eta_history.last().copied()
    }
}
