//! Dual semismooth Newton solver.
//!
//! Instead of attacking the nonsmooth primal directly, this solver minimizes
//! the dual objective
//!
//! ```text
//! h(z) = 0.5 ||z||^2 - lambda * env(-A^T z / lambda) + (lambda/2) ||A^T z / lambda||^2 + b^T z
//! ```
//!
//! where `env` is the Moreau envelope of `phi / lambda`.  `h` is strongly
//! convex and continuously differentiable with the semismooth gradient
//!
//! ```text
//! grad h(z) = z + b - A prox_{phi/lambda}(-A^T z / lambda),
//! ```
//!
//! so a semismooth Newton iteration applies.  Each step selects the 0/1
//! diagonal `Theta` of the prox at the current point and solves
//! `(I_m + lambda^{-1} A_I A_I^T) d = -grad h(z)` over the active columns
//! `I`, then globalizes with Armijo backtracking on `h`.  The primal iterate
//! is recovered as `x = prox_{phi/lambda}(-A^T z / lambda)`; convergence is
//! declared on the primal optimality measure `eta` (or on `||grad h||`, which
//! vanishes at the unique dual solution).

use std::time::Instant;

use crate::error::{Error, Result};
use crate::float::{cast, Float};
use crate::linalg::{all_finite, dot, norm2};
use crate::linsys::{solve_dual_system, CgReport};
use crate::problem::ProblemData;
use crate::solver::{SolveReport, SolverOptions, StopReason};

/// Scaled dual point `c = -A^T z / lambda`, the argument of every prox in the
/// dual iteration.
fn scaled_dual_point<F: Float>(p: &ProblemData<F>, z: &[F]) -> Vec<F> {
    let mut c = vec![F::zero(); p.n()];
    p.a.tr_matvec(z, &mut c);
    let neg_lam_inv = -F::one() / p.lambda;
    for ci in c.iter_mut() {
        *ci *= neg_lam_inv;
    }
    c
}

/// Dual objective `h(z)`.  Strong duality gives `min f = -min h`, so the
/// duality gap `f(x) + h(z)` vanishes at the solution pair.
pub fn dual_objective<F: Float>(p: &ProblemData<F>, z: &[F]) -> Result<F> {
    if z.len() != p.m() {
        return Err(Error::Config(format!("z has length {}, expected {}", z.len(), p.m())));
    }
    if !all_finite(z) {
        return Err(Error::NonFinite { context: "dual point z" });
    }
    let lambda = p.lambda;
    let c = scaled_dual_point(p, z);
    let env = p.reg.moreau_envelope(F::one() / lambda, &c)?;
    let half = cast::<F>(0.5);
    let zz: F = half * dot(z, z);
    let cc: F = half * lambda * dot(&c, &c);
    Ok(zz - lambda * env + cc + dot(&p.b, z))
}

/// Gradient of the dual objective, `z + b - A x(z)` with
/// `x(z) = prox_{phi/lambda}(-A^T z / lambda)`.
pub fn dual_gradient<F: Float>(p: &ProblemData<F>, z: &[F]) -> Result<Vec<F>> {
    let x = recover_primal(p, z)?;
    let mut ax = vec![F::zero(); p.m()];
    p.a.matvec(&x, &mut ax);
    Ok(z.iter()
        .zip(&p.b)
        .zip(&ax)
        .map(|((&zi, &bi), &axi)| zi + bi - axi)
        .collect())
}

/// Primal point associated with a dual point:
/// `x = prox_{phi/lambda}(-A^T z / lambda)`.
pub fn recover_primal<F: Float>(p: &ProblemData<F>, z: &[F]) -> Result<Vec<F>> {
    if z.len() != p.m() {
        return Err(Error::Config(format!("z has length {}, expected {}", z.len(), p.m())));
    }
    if !all_finite(z) {
        return Err(Error::NonFinite { context: "dual point z" });
    }
    let c = scaled_dual_point(p, z);
    p.reg.prox(F::one() / p.lambda, &c)
}

/// One semismooth Newton direction at `z` with gradient `g`:
/// solves `(I + lambda^{-1} A_I A_I^T) d = -g` where `I` is the active set of
/// the prox diagonal at `-A^T z / lambda`.  When `I` is empty the system is
/// the identity and `d = -g`.
///
/// Returns the direction, the linear-system diagnostics, and `|I|`.
pub fn newton_direction<F: Float>(
    p: &ProblemData<F>,
    z: &[F],
    g: &[F],
    opts: &SolverOptions<F>,
) -> Result<(Vec<F>, CgReport<F>, usize)> {
    let c = scaled_dual_point(p, z);
    let diag = p.reg.bsub_diag(F::one() / p.lambda, &c);
    let rhs: Vec<F> = g.iter().map(|&gi| -gi).collect();
    let tol = opts.newton_system_tol(norm2(g));
    let sub = p.a.subset(&diag.active);
    let (d, report) = solve_dual_system(&sub, p.lambda, &rhs, opts.strategy, tol)?;
    Ok((d, report, diag.active.len()))
}

/// Armijo backtracking on the dual objective: the first
/// `alpha in {1, beta, beta^2, ...}` with
/// `h(z + alpha d) <= h(z) + rho * alpha * <g, d>` is accepted.
///
/// Returns `(alpha, z + alpha d, h(z + alpha d))`; fails only if no step in
/// the budget decreases `h` enough, which cannot happen for a descent
/// direction of this strongly convex objective unless the inputs are broken.
pub fn line_search<F: Float>(
    p: &ProblemData<F>,
    z: &[F],
    d: &[F],
    g: &[F],
    opts: &SolverOptions<F>,
) -> Result<(F, Vec<F>, F)> {
    let h0 = dual_objective(p, z)?;
    let slope = dot(g, d);
    debug_assert!(slope < F::zero(), "line search needs a descent direction");
    let mut alpha = F::one();
    for _ in 0..=opts.max_backtracks {
        let z_new: Vec<F> = z.iter().zip(d).map(|(&zi, &di)| zi + alpha * di).collect();
        let h_new = dual_objective(p, &z_new)?;
        if h_new <= h0 + opts.sufficient_decrease * alpha * slope {
            return Ok((alpha, z_new, h_new));
        }
        alpha *= opts.backtrack;
    }
    Err(Error::LineSearch { backtracks: opts.max_backtracks })
}

/// Run the dual semismooth Newton iteration from `z0` (zero if omitted).
///
/// Returns the recovered primal solution, the dual solution, and a report.
/// Hitting the iteration cap returns the best iterate seen with
/// `converged = false`; a line-search breakdown is a hard error.
pub fn dssn_solve<F: Float>(
    p: &ProblemData<F>,
    opts: &SolverOptions<F>,
    z0: Option<&[F]>,
) -> Result<(Vec<F>, Vec<F>, SolveReport<F>)> {
    let start = Instant::now();
    let m = p.m();
    let mut z: Vec<F> = match z0 {
        Some(z0) => {
            if z0.len() != m {
                return Err(Error::Config(format!(
                    "warm-start z0 has length {}, expected {m}",
                    z0.len()
                )));
            }
            if !all_finite(z0) {
                return Err(Error::NonFinite { context: "warm-start z0" });
            }
            z0.to_vec()
        }
        None => vec![F::zero(); m],
    };

    let mut report = SolveReport::new();
    let mut x = recover_primal(p, &z)?;
    let mut g = dual_gradient(p, &z)?;
    let mut h = dual_objective(p, &z)?;

    let mut best: Option<(F, Vec<F>, Vec<F>)> = None;
    loop {
        let eta = p.kkt_residual(&x)?;
        let f = p.objective(&x);
        report.eta_history.push(eta);
        report.objective_history.push(f);
        report.gap_history.push(f + h);
        if best.as_ref().map_or(true, |(be, _, _)| eta < *be) {
            best = Some((eta, x.clone(), z.clone()));
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

        let (d, _cg, active) = newton_direction(p, &z, &g, opts)?;
        let (alpha, z_new, _h_new) = line_search(p, &z, &d, &g, opts)?;
        z = z_new;
        x = recover_primal(p, &z)?;
        g = dual_gradient(p, &z)?;
        h = dual_objective(p, &z)?;
        report.step_sizes.push(alpha);
        report.active_set_sizes.push(active);
        report.iterations += 1;
    }

    report.wall_time = start.elapsed().as_secs_f64();
    if report.converged {
        Ok((x, z, report))
    } else {
        // hand back the iterate with the best optimality measure seen
        let (_, bx, bz) = best.expect("at least one iterate was visited");
        Ok((bx, bz, report))
    }
}
