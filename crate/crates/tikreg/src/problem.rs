//! Problem container: the regularized least-squares instance
//! `min 0.5 ||Ax - b||^2 + (lambda/2) ||x||^2 + phi(x)`
//! together with its objective and the natural-residual optimality measure.

use crate::error::{Error, Result};
use crate::float::{cast, Float};
use crate::linalg::{all_finite, norm2};
use crate::matrix::DesignMatrix;
use crate::regularizer::Regularizer;

/// A fully specified problem instance.
#[derive(Clone, Debug)]
pub struct ProblemData<F> {
    pub a: DesignMatrix<F>,
    pub b: Vec<F>,
    pub lambda: F,
    pub reg: Regularizer<F>,
}

impl<F: Float> ProblemData<F> {
    /// Validating constructor: shapes must match, `b` must be finite, and
    /// `lambda` must be strictly positive.
    pub fn new(a: DesignMatrix<F>, b: Vec<F>, lambda: F, reg: Regularizer<F>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::Config(format!(
                "b has length {}, but A has {} rows",
                b.len(),
                a.rows()
            )));
        }
        if !all_finite(&b) {
            return Err(Error::NonFinite { context: "right-hand side b" });
        }
        if !(lambda > F::zero()) || !lambda.is_finite() {
            return Err(Error::Config(format!("lambda must be positive and finite, got {lambda}")));
        }
        reg.validate()?;
        Ok(ProblemData { a, b, lambda, reg })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// `Ax - b`.
    pub fn residual(&self, x: &[F]) -> Vec<F> {
        let mut r = vec![F::zero(); self.m()];
        self.a.matvec(x, &mut r);
        for (ri, &bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        r
    }

    /// Primal objective `0.5 ||Ax - b||^2 + (lambda/2) ||x||^2 + phi(x)`
    /// (infinite when `x` is infeasible for an orthant-constrained penalty).
    pub fn objective(&self, x: &[F]) -> F {
        let r = self.residual(x);
        let half = cast::<F>(0.5);
        let data: F = half * r.iter().map(|&v| v * v).sum::<F>();
        let ridge: F = half * self.lambda * x.iter().map(|&v| v * v).sum::<F>();
        data + ridge + self.reg.value(x)
    }

    /// Gradient of the smooth part: `A^T (Ax - b) + lambda x`.
    pub fn smooth_gradient(&self, x: &[F]) -> Vec<F> {
        let r = self.residual(x);
        let mut g = vec![F::zero(); self.n()];
        self.a.tr_matvec(&r, &mut g);
        for (gi, &xi) in g.iter_mut().zip(x) {
            *gi += self.lambda * xi;
        }
        g
    }

    /// Natural-residual optimality measure
    /// `eta(x) = || x - prox_phi(x - lambda x - A^T (Ax - b)) ||`,
    /// zero exactly at the unique solution.
    pub fn kkt_residual(&self, x: &[F]) -> Result<F> {
        let psi = self.natural_residual(x)?;
        Ok(norm2(&psi))
    }

    /// The vector inside the optimality measure:
    /// `Psi(x) = x - prox_phi((1 - lambda) x - A^T (Ax - b))`.
    pub fn natural_residual(&self, x: &[F]) -> Result<Vec<F>> {
        if !all_finite(x) {
            return Err(Error::NonFinite { context: "iterate x" });
        }
        let y = self.prox_argument(x);
        let p = self.reg.prox(F::one(), &y)?;
        Ok(x.iter().zip(&p).map(|(&xi, &pi)| xi - pi).collect())
    }

    /// `y = (1 - lambda) x - A^T (Ax - b)`, the point the optimality prox is
    /// evaluated at.
    pub fn prox_argument(&self, x: &[F]) -> Vec<F> {
        let r = self.residual(x);
        let mut aty = vec![F::zero(); self.n()];
        self.a.tr_matvec(&r, &mut aty);
        let one_minus_lambda = F::one() - self.lambda;
        x.iter()
            .zip(&aty)
            .map(|(&xi, &gi)| one_minus_lambda * xi - gi)
            .collect()
    }
}

/// Count entries with `|x_i| > threshold`.
pub fn count_nonzeros<F: Float>(x: &[F], threshold: F) -> usize {
    x.iter().filter(|&&v| v.abs() > threshold).count()
}
