//! Backends for the two structured SPD systems the Newton solvers produce:
//!
//! * the dual system `(I_m + lambda^{-1} A_I A_I^T) d = rhs`, solvable by an
//!   explicit `m x m` Cholesky factorization, by the Woodbury identity through
//!   the smaller `|I| x |I|` Gram system, or matrix-free by conjugate
//!   gradients (the operator's eigenvalues are all `>= 1`, so CG is safe at
//!   any active-set size);
//! * the primal reduced system `(lambda I + A_I^T A_I) d_I = rhs_I` obtained
//!   after eliminating the identity rows of the primal Newton matrix.
//!
//! Factorizations are recomputed from scratch on every call; no state is
//! carried between Newton iterations.

use crate::error::{Error, Result};
use crate::float::Float;
use crate::linalg::{all_finite, cg_iteration_cap, conjugate_gradient, dist2, DenseMatrix};
use crate::matrix::{ColumnSubset, DesignMatrix};

/// How to solve the dual Newton system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinSysStrategy {
    /// Form `I_m + lambda^{-1} A_I A_I^T` explicitly and factor it.
    CholeskyM,
    /// Woodbury identity: factor the `|I| x |I|` Gram system instead.
    Smw,
    /// Matrix-free conjugate gradients.
    Cg,
    /// Pick one of the above from the dimensions at hand.
    Auto,
}

/// Diagnostics from a dual-system solve.  Direct strategies report zero
/// iterations; the residual norm is always measured on the unreduced system.
#[derive(Clone, Copy, Debug)]
pub struct CgReport<F> {
    pub iterations: usize,
    pub final_residual_norm: F,
    /// False only when CG hit its iteration cap before reaching tolerance.
    pub converged: bool,
}

/// Size cap under which a direct factorization is considered cheap.
const DIRECT_LIMIT: usize = 4000;

/// Resolve `Auto` from the system dimensions: factor on the `m` side when `m`
/// is the small one, use Woodbury when the active set is much smaller than
/// `m`, and otherwise go matrix-free.
pub fn select_strategy(m: usize, k: usize) -> LinSysStrategy {
    if m <= k.min(DIRECT_LIMIT) {
        LinSysStrategy::CholeskyM
    } else if k <= (m / 4).min(DIRECT_LIMIT) {
        LinSysStrategy::Smw
    } else {
        LinSysStrategy::Cg
    }
}

/// `out = (I + lambda^{-1} A_I A_I^T) v`.
fn apply_dual_operator<F: Float>(a_i: &ColumnSubset<'_, F>, lam_inv: F, v: &[F], out: &mut [F]) {
    let mut tk = vec![F::zero(); a_i.k()];
    a_i.tr_matvec(v, &mut tk);
    a_i.matvec(&tk, out);
    for (oi, &vi) in out.iter_mut().zip(v) {
        *oi = vi + lam_inv * *oi;
    }
}

/// Solve `(I_m + lambda^{-1} A_I A_I^T) d = rhs`.
///
/// `cg_tol` is the absolute residual tolerance used when the CG path runs;
/// direct strategies ignore it.  The returned report always carries the true
/// unreduced residual norm of the computed solution.
pub fn solve_dual_system<F: Float>(
    a_i: &ColumnSubset<'_, F>,
    lambda: F,
    rhs: &[F],
    strategy: LinSysStrategy,
    cg_tol: F,
) -> Result<(Vec<F>, CgReport<F>)> {
    let m = a_i.rows();
    let k = a_i.k();
    debug_assert_eq!(rhs.len(), m);
    if !(lambda > F::zero()) || !lambda.is_finite() {
        return Err(Error::Config(format!("lambda must be positive and finite, got {lambda}")));
    }
    if !all_finite(rhs) {
        return Err(Error::NonFinite { context: "dual system right-hand side" });
    }
    let lam_inv = F::one() / lambda;
    let resolved = match strategy {
        LinSysStrategy::Auto => select_strategy(m, k),
        s => s,
    };

    let (d, iterations, cg_converged) = match resolved {
        LinSysStrategy::CholeskyM => {
            let mut v = DenseMatrix::eye(m);
            a_i.add_outer_into(lam_inv, &mut v);
            v.cholesky_in_place("cholesky-m")?;
            (v.cholesky_solve(rhs), 0, true)
        }
        LinSysStrategy::Smw => {
            // (I + c A A^T)^{-1} rhs = rhs - c A (I_k + c A^T A)^{-1} A^T rhs
            if k == 0 {
                (rhs.to_vec(), 0, true)
            } else {
                let mut g = a_i.gram();
                for p in 0..k {
                    for q in 0..k {
                        let v = g.get(p, q) * lam_inv;
                        g.set(p, q, if p == q { F::one() + v } else { v });
                    }
                }
                g.cholesky_in_place("smw")?;
                let mut w = vec![F::zero(); k];
                a_i.tr_matvec(rhs, &mut w);
                let y = g.cholesky_solve(&w);
                let mut corr = vec![F::zero(); m];
                a_i.matvec(&y, &mut corr);
                let d: Vec<F> =
                    rhs.iter().zip(&corr).map(|(&r, &c)| r - lam_inv * c).collect();
                (d, 0, true)
            }
        }
        LinSysStrategy::Cg => {
            let out = conjugate_gradient(
                &mut |v: &[F], o: &mut [F]| apply_dual_operator(a_i, lam_inv, v, o),
                rhs,
                cg_tol,
                cg_iteration_cap(m),
            );
            (out.x, out.iterations, out.converged)
        }
        LinSysStrategy::Auto => unreachable!("Auto was resolved above"),
    };

    if !all_finite(&d) {
        return Err(Error::NonFinite { context: "dual system solution" });
    }
    let mut vd = vec![F::zero(); m];
    apply_dual_operator(a_i, lam_inv, &d, &mut vd);
    let residual = dist2(&vd, rhs);
    Ok((d, CgReport { iterations, final_residual_norm: residual, converged: cg_converged }))
}

/// Solve the block-reduced primal Newton system.
///
/// The unreduced system is `J d = -psi` with
/// `J = I - Theta ((1 - lambda) I - A^T A)`; rows with `theta = 0` are
/// identity rows, so `d_{I0} = -psi_{I0}` directly, and the remaining block is
/// `(lambda I + A_I^T A_I) d_I = -psi_I - A_I^T A_{I0} d_{I0}`.
///
/// Returns the full-length direction `d`.  The reduced SPD block is factored
/// directly while `|I|` stays small and solved by CG otherwise (or as forced
/// by `strategy`).
pub fn solve_primal_system<F: Float>(
    a: &DesignMatrix<F>,
    active: &[usize],
    inactive: &[usize],
    lambda: F,
    psi: &[F],
    strategy: LinSysStrategy,
    cg_tol: F,
) -> Result<Vec<F>> {
    let n = a.cols();
    debug_assert_eq!(psi.len(), n);
    debug_assert_eq!(active.len() + inactive.len(), n);
    if !(lambda > F::zero()) || !lambda.is_finite() {
        return Err(Error::Config(format!("lambda must be positive and finite, got {lambda}")));
    }
    if !all_finite(psi) {
        return Err(Error::NonFinite { context: "primal system right-hand side" });
    }

    let mut d = vec![F::zero(); n];
    for &i in inactive {
        d[i] = -psi[i];
    }
    let k = active.len();
    if k == 0 {
        return Ok(d);
    }

    // rhs_I = -psi_I - A_I^T (A_{I0} d_{I0}); the inactive block of d already
    // holds d_{I0} and its active block is zero, so A d = A_{I0} d_{I0}.
    let mut coupled = vec![F::zero(); a.rows()];
    a.matvec(&d, &mut coupled);
    let a_i = a.subset(active);
    let mut rhs = vec![F::zero(); k];
    a_i.tr_matvec(&coupled, &mut rhs);
    for (p, &i) in active.iter().enumerate() {
        rhs[p] = -psi[i] - rhs[p];
    }

    let use_cg = match strategy {
        LinSysStrategy::Cg => true,
        LinSysStrategy::CholeskyM | LinSysStrategy::Smw => false,
        LinSysStrategy::Auto => k > DIRECT_LIMIT,
    };
    let d_i = if use_cg {
        let out = conjugate_gradient(
            &mut |v: &[F], o: &mut [F]| {
                // o = lambda v + A_I^T (A_I v)
                let mut tmp = vec![F::zero(); a.rows()];
                a_i.matvec(v, &mut tmp);
                a_i.tr_matvec(&tmp, o);
                for (oi, &vi) in o.iter_mut().zip(v) {
                    *oi += lambda * vi;
                }
            },
            &rhs,
            cg_tol,
            cg_iteration_cap(k),
        );
        out.x
    } else {
        let mut g = a_i.gram();
        for p in 0..k {
            g.add_to(p, p, lambda);
        }
        g.cholesky_in_place("primal-cholesky")?;
        g.cholesky_solve(&rhs)
    };

    for (p, &i) in active.iter().enumerate() {
        d[i] = d_i[p];
    }
    if !all_finite(&d) {
        return Err(Error::NonFinite { context: "primal system solution" });
    }
    Ok(d)
}
