//! Primal semismooth Newton solver.
//!
//! Works directly on the primal optimality system: the solution is the unique
//! root of the natural residual
//!
//! ```text
//! Psi(x) = x - prox_phi((1 - lambda) x - A^T (Ax - b)),
//! ```
//!
//! which is semismooth with generalized Jacobian
//! `J = I - Theta ((1 - lambda) I - A^T A)` for the 0/1 prox diagonal
//! `Theta`.  Rows with `theta = 0` are identity rows, so each Newton system
//! collapses to a `|I| x |I|` SPD block (see
//! [`solve_primal_system`](crate::linsys::solve_primal_system)).
//!
//! Globalization minimizes the merit `r(x) = ||Psi(x)||^2` with Armijo
//! backtracking along the Newton direction, using `2 J^T Psi` as the descent
//! slope; if the Newton direction fails the descent test the iteration falls
//! back to the steepest-descent direction of the merit.  Unlike the dual
//! solver this scheme carries no global convergence guarantee — on hard
//! instances it can stall, which the report surfaces honestly instead of
//! looping forever.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::float::Float;
use crate::linalg::{all_finite, dot, norm2};
use crate::linsys::solve_primal_system;
use crate::problem::ProblemData;
use crate::regularizer::JacobianDiag;
use crate::solver::{SolveReport, SolverOptions, StopReason};

/// Everything the Newton step needs at the current iterate.
#[derive(Clone, Debug)]
pub struct MeritState<F> {
    /// Natural residual `Psi(x)`.
    pub psi: Vec<F>,
    /// Merit value `r = ||Psi||^2`.
    pub merit: F,
    /// Prox argument `y = (1 - lambda) x - A^T (Ax - b)`.
    pub prox_arg: Vec<F>,
    /// Prox diagonal at `y` with its active/inactive index sets.
    pub diag: JacobianDiag,
}

/// Evaluate the natural residual, merit, and Jacobian diagonal at `x`.
pub fn merit_state<F: Float>(p: &ProblemData<F>, x: &[F]) -> Result<MeritState<F>> {
    if x.len() != p.n() {
        return Err(Error::Config(format!("x has length {}, expected {}", x.len(), p.n())));
    }
    if !all_finite(x) {
        return Err(Error::NonFinite { context: "iterate x" });
    }
    let y = p.prox_argument(x);
    let prox = p.reg.prox(F::one(), &y)?;
    let psi: Vec<F> = x.iter().zip(&prox).map(|(&xi, &pi)| xi - pi).collect();
    let merit = dot(&psi, &psi);
    let diag = p.reg.bsub_diag(F::one(), &y);
    Ok(MeritState { psi, merit, prox_arg: y, diag })
}

/// Newton direction: solve `J d = -Psi` through the identity/SPD block
/// reduction.
pub fn pssn_direction<F: Float>(
    p: &ProblemData<F>,
    state: &MeritState<F>,
    opts: &SolverOptions<F>,
) -> Result<Vec<F>> {
    let tol = opts.newton_system_tol(norm2(&state.psi));
    solve_primal_system(
        &p.a,
        &state.diag.active,
        &state.diag.inactive,
        p.lambda,
        &state.psi,
        opts.strategy,
        tol,
    )
}

/// Descent slope surrogate for the merit: `2 J^T Psi` with
/// `J = I - Theta ((1 - lambda) I - A^T A)` (exact gradient wherever the prox
/// diagonal is locally constant).
pub fn pssn_merit_gradient<F: Float>(p: &ProblemData<F>, state: &MeritState<F>) -> Vec<F> {
    let n = p.n();
    debug_assert_eq!(state.psi.len(), n);
    // masked = Theta * Psi
    let mut masked = vec![F::zero(); n];
    for &i in &state.diag.active {
        masked[i] = state.psi[i];
    }
    // q = A^T A masked
    let mut am = vec![F::zero(); p.m()];
    p.a.matvec(&masked, &mut am);
    let mut q = vec![F::zero(); n];
    p.a.tr_matvec(&am, &mut q);
    let one_minus_lambda = F::one() - p.lambda;
    let two = F::one() + F::one();
    (0..n)
        .map(|i| two * (state.psi[i] - one_minus_lambda * masked[i] + q[i]))
        .collect()
}

/// Run the primal semismooth Newton iteration from `x0` (zero if omitted).
///
/// Hitting the iteration cap or a failed line search returns the best iterate
/// seen with `converged = false` and the reason in the report; neither is a
/// hard error.
pub fn pssn_solve<F: Float>(
    p: &ProblemData<F>,
    opts: &SolverOptions<F>,
    x0: Option<&[F]>,
) -> Result<(Vec<F>, SolveReport<F>)> {
    let start = Instant::now();
    let n = p.n();
    let mut x: Vec<F> = match x0 {
        Some(x0) => {
            if x0.len() != n {
                return Err(Error::Config(format!(
                    "warm-start x0 has length {}, expected {n}",
                    x0.len()
                )));
            }
            if !all_finite(x0) {
                return Err(Error::NonFinite { context: "warm-start x0" });
            }
            x0.to_vec()
        }
        None => vec![F::zero(); n],
    };

    let mut report = SolveReport::new();
    let mut state = merit_state(p, &x)?;
    let mut best: Option<(F, Vec<F>)> = None;

    loop {
        let eta = state.merit.sqrt();
        report.eta_history.push(eta);
        report.objective_history.push(p.objective(&x));
        if best.as_ref().map_or(true, |(be, _)| eta < *be) {
            best = Some((eta, x.clone()));
        }

        if eta <= opts.eps {
            report.converged = true;
            report.stop = StopReason::Converged;
            break;
        }
        if report.iterations >= opts.max_iter {
            report.stop = StopReason::MaxIterations;
            break;
        }

        let mut d = pssn_direction(p, &state, opts)?;
        let g = pssn_merit_gradient(p, &state);
        let mut slope = dot(&g, &d);
        if !(slope < F::zero()) {
            // Newton direction failed the descent test: fall back to the
            // steepest-descent direction of the merit
            d = g.iter().map(|&gi| -gi).collect();
            slope = -dot(&g, &g);
            if !(slope < F::zero()) {
                // zero merit gradient at a non-solution: nowhere to go
                report.stop = StopReason::LineSearchFailure;
                break;
            }
        }

        let active = state.diag.active.len();
        let mut alpha = F::one();
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let trial: Vec<F> = x.iter().zip(&d).map(|(&xi, &di)| xi + alpha * di).collect();
            let trial_state = merit_state(p, &trial)?;
            if trial_state.merit <= state.merit + opts.sufficient_decrease * alpha * slope {
                accepted = Some((trial, trial_state));
                break;
            }
            alpha *= opts.backtrack;
        }
        match accepted {
            Some((trial, trial_state)) => {
                x = trial;
                state = trial_state;
                report.step_sizes.push(alpha);
                report.active_set_sizes.push(active);
                report.iterations += 1;
            }
            None => {
                report.stop = StopReason::LineSearchFailure;
                break;
            }
        }
    }

    report.wall_time = start.elapsed().as_secs_f64();
    if report.converged {
        Ok((x, report))
    } else {
        let (_, bx) = best.expect("at least one iterate was visited");
        Ok((bx, report))
    }
}
