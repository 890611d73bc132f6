//! Accelerated proximal gradient (FISTA-style) baseline, plus a tiny
//! exhaustive grid oracle.  Both exist to cross-check the Newton solvers:
//! the proximal-gradient method is slow but has ironclad convergence theory,
//! and the grid oracle is an independent brute-force minimizer for `n <= 3`.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::float::{cast, Float};
use crate::linalg::{all_finite, norm2, SplitMix64};
use crate::problem::ProblemData;
use crate::solver::{SolveReport, StopReason};

/// Result of estimating the gradient Lipschitz constant
/// `L >= sigma_max(A)^2 + lambda`.
#[derive(Clone, Copy, Debug)]
pub struct LipschitzEstimate<F> {
    /// Safe step-size constant: the estimated `sigma_max(A)^2`, inflated by
    /// 1%, plus `lambda`.
    pub l: F,
    /// Raw largest-squared-singular-value estimate from power iteration.
    pub sigma_max_sq: F,
    /// Power-iteration count used.
    pub iterations: usize,
}

/// Estimate `sigma_max(A)^2` by power iteration on `A^T A`, run to a relative
/// change of `1e-6` from a fixed deterministic starting vector, then inflated
/// by 1% to make `l = 1.01 * sigma_max_sq + lambda` a safe upper bound.
pub fn estimate_lipschitz<F: Float>(p: &ProblemData<F>) -> LipschitzEstimate<F> {
    let n = p.n();
    let mut rng = SplitMix64::new(0x9e3779b97f4a7c15);
    let mut v: Vec<F> = (0..n).map(|_| rng.next_signed_unit::<F>()).collect();
    let nv = norm2(&v);
    if nv > F::zero() {
        for vi in v.iter_mut() {
            *vi /= nv;
        }
    }
    let mut av = vec![F::zero(); p.m()];
    let mut w = vec![F::zero(); n];
    let mut sigma_sq = F::zero();
    let mut iterations = 0;
    let tol = cast::<F>(1e-6);
    for it in 1..=500 {
        iterations = it;
        p.a.matvec(&v, &mut av);
        let new_sigma_sq = crate::linalg::dot(&av, &av); // Rayleigh quotient, ||v|| = 1
        p.a.tr_matvec(&av, &mut w);
        let nw = norm2(&w);
        if nw == F::zero() {
            // A v landed in the null space; for a fixed generic start this
            // only happens when A = 0
            sigma_sq = F::zero();
            break;
        }
        let rel = (new_sigma_sq - sigma_sq).abs() / new_sigma_sq.max(F::min_positive_value());
        sigma_sq = new_sigma_sq;
        for (vi, &wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
        if rel <= tol {
            break;
        }
    }
    let inflate = cast::<F>(1.01);
    LipschitzEstimate { l: inflate * sigma_sq + p.lambda, sigma_max_sq: sigma_sq, iterations }
}

/// Accelerated proximal gradient from the zero vector.
pub fn apg_solve<F: Float>(
    p: &ProblemData<F>,
    eps: F,
    max_iter: usize,
) -> Result<(Vec<F>, SolveReport<F>)> {
    apg_solve_warm(p, None, eps, max_iter)
}

/// Accelerated proximal gradient from a caller-supplied starting point.
///
/// Constant step `1/L` with Nesterov momentum, restarted whenever the
/// objective would increase, which keeps the recorded objective monotone.
pub fn apg_solve_warm<F: Float>(
    p: &ProblemData<F>,
    x0: Option<&[F]>,
    eps: F,
    max_iter: usize,
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
            // project infeasible starts so the objective is finite
            p.reg.prox(F::one(), x0)?
        }
        None => vec![F::zero(); n],
    };

    let est = estimate_lipschitz(p);
    let step = F::one() / est.l;
    let mut report = SolveReport::new();

    let mut y = x.clone();
    let mut t = F::one();
    let mut f_x = p.objective(&x);
    let half = cast::<F>(0.5);
    let quarter4 = cast::<F>(4.0);

    let prox_grad = |point: &[F]| -> Result<Vec<F>> {
        let g = p.smooth_gradient(point);
        let shifted: Vec<F> =
            point.iter().zip(&g).map(|(&pi, &gi)| pi - step * gi).collect();
        p.reg.prox(step, &shifted)
    };

    loop {
        let eta = p.kkt_residual(&x)?;
        report.eta_history.push(eta);
        report.objective_history.push(f_x);
        if eta <= eps {
            report.converged = true;
            report.stop = StopReason::Converged;
            break;
        }
        if report.iterations >= max_iter {
            report.stop = StopReason::MaxIterations;
            break;
        }

        let cand = prox_grad(&y)?;
        let f_cand = p.objective(&cand);
        if f_cand > f_x {
            // extrapolation overshot: restart momentum with a plain proximal
            // gradient step from x, which cannot increase the objective
            let fallback = prox_grad(&x)?;
            let f_fb = p.objective(&fallback);
            t = F::one();
            x = fallback;
            y = x.clone();
            f_x = f_fb;
        } else {
            let t_new = half * (F::one() + (F::one() + quarter4 * t * t).sqrt());
            let coef = (t - F::one()) / t_new;
            y = cand
                .iter()
                .zip(&x)
                .map(|(&ci, &xi)| ci + coef * (ci - xi))
                .collect();
            t = t_new;
            x = cand;
            f_x = f_cand;
        }
        report.iterations += 1;
    }

    report.wall_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}

/// Brute-force minimizer for `n <= 3`: exhaustive search over a per-axis grid
/// of `resolution` points covering a box that provably contains the solution
/// (`||x*|| <= ||b|| / sqrt(lambda)` since `f(x*) <= f(0)`; the box uses twice
/// that radius, clipped to the nonnegative orthant when `phi` demands it),
/// followed by one exact coordinate-descent refinement pass.
pub fn grid_oracle<F: Float>(p: &ProblemData<F>, resolution: usize) -> Result<Vec<F>> {
    let n = p.n();
    if n > 3 {
        return Err(Error::UnsupportedSize(n));
    }
    if resolution < 1001 {
        return Err(Error::Config(format!(
            "grid resolution must be at least 1001, got {resolution}"
        )));
    }
    let radius = cast::<F>(2.0) * norm2(&p.b) / p.lambda.sqrt();
    let lo = if p.reg.has_nonneg() { F::zero() } else { -radius };
    let hi = radius;
    let spacing = (hi - lo) / cast::<F>((resolution - 1) as f64);

    // depth-first sweep with the residual updated incrementally per axis
    let m = p.m();
    let mut best_x = vec![F::zero(); n];
    let mut best_f = F::infinity();
    let mut x = vec![F::zero(); n];
    // residual stack: r_level[d] = A x[0..d] - b
    let base: Vec<F> = p.b.iter().map(|&bi| -bi).collect();
    let mut stack: Vec<Vec<F>> = vec![vec![F::zero(); m]; n + 1];
    stack[0].copy_from_slice(&base);

    fn sweep<F: Float>(
        p: &ProblemData<F>,
        depth: usize,
        lo: F,
        spacing: F,
        resolution: usize,
        x: &mut Vec<F>,
        stack: &mut Vec<Vec<F>>,
        best_f: &mut F,
        best_x: &mut Vec<F>,
    ) {
        let n = p.n();
        let m = p.m();
        let half = cast::<F>(0.5);
        for g in 0..resolution {
            let q = lo + spacing * cast::<F>(g as f64);
            x[depth] = q;
            // stack[depth + 1] = stack[depth] + q * A[:, depth]
            let (head, tail) = stack.split_at_mut(depth + 1);
            tail[0].copy_from_slice(&head[depth]);
            if q != F::zero() {
                let col: Vec<usize> = vec![depth];
                p.a.subset(&col).matvec(&[q], &mut tail[0]);
                for i in 0..m {
                    tail[0][i] += head[depth][i];
                }
            }
            if depth + 1 == n {
                let r = &stack[depth + 1];
                let data: F = half * r.iter().map(|&v| v * v).sum::<F>();
                let ridge: F = half * p.lambda * x.iter().map(|&v| v * v).sum::<F>();
                let f = data + ridge + p.reg.value(x);
                if f < *best_f {
                    *best_f = f;
                    best_x.copy_from_slice(x);
                }
            } else {
                sweep(p, depth + 1, lo, spacing, resolution, x, stack, best_f, best_x);
            }
        }
    }
    sweep(p, 0, lo, spacing, resolution, &mut x, &mut stack, &mut best_f, &mut best_x);

    // one exact coordinate-minimization pass to polish the grid winner
    let mut xr = best_x.clone();
    for i in 0..n {
        let col_idx = [i];
        let sub = p.a.subset(&col_idx);
        // residual without coordinate i: A x - b - a_i x_i
        let mut r = vec![F::zero(); m];
        p.a.matvec(&xr, &mut r);
        let mut ai = vec![F::zero(); m];
        sub.matvec(&[F::one()], &mut ai);
        for j in 0..m {
            r[j] -= ai[j] * xr[i] + p.b[j];
        }
        let c2 = crate::linalg::dot(&ai, &ai) + p.lambda;
        let c1 = crate::linalg::dot(&ai, &r);
        // argmin over q of 0.5 c2 q^2 + c1 q + phi_i(q) = prox of phi/c2
        let q = p.reg.prox(F::one() / c2, &[-c1 / c2])?;
        xr[i] = q[0];
    }
    if p.objective(&xr) <= best_f {
        Ok(xr)
    } else {
        Ok(best_x)
    }
}
