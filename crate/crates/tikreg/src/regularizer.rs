//! The nonsmooth penalty `phi` and its proximal machinery: proximal maps,
//! Moreau envelopes, and the 0/1 diagonal generalized Jacobians the semismooth
//! Newton solvers reduce onto.
//!
//! Three penalties are supported, all with coordinate-separable prox maps:
//!
//! * `L1`: `phi(x) = mu * ||x||_1` (soft thresholding),
//! * `NonNeg`: indicator of the nonnegative orthant (projection),
//! * `L1NonNeg`: their sum, whose prox composes the two: soft thresholding
//!   after orthant projection, which collapses to `max(u - t, 0)`.
//!
//! Every map here is evaluated coordinate-wise in index order with no
//! intermediate reductions, so results are bitwise deterministic.

use crate::error::{Error, Result};
use crate::float::{cast, Float};

/// The nonsmooth regularizer `phi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regularizer<F> {
    /// `mu * ||x||_1` with `mu > 0`.
    L1 { mu: F },
    /// Indicator of `x >= 0`.
    NonNeg,
    /// `mu * ||x||_1` plus the indicator of `x >= 0`, `mu > 0`.
    L1NonNeg { mu: F },
}

/// Diagonal element of the generalized Jacobian of a prox map: a 0/1 vector
/// together with the index sets it induces.
#[derive(Clone, Debug)]
pub struct JacobianDiag {
    /// `theta[i]` is true where the prox is locally the identity.
    pub theta: Vec<bool>,
    /// Indices with `theta = 1`, ascending.
    pub active: Vec<usize>,
    /// Indices with `theta = 0`, ascending.
    pub inactive: Vec<usize>,
}

impl JacobianDiag {
    fn from_theta(theta: Vec<bool>) -> Self {
        let active = theta.iter().enumerate().filter(|(_, &t)| t).map(|(i, _)| i).collect();
        let inactive = theta.iter().enumerate().filter(|(_, &t)| !t).map(|(i, _)| i).collect();
        JacobianDiag { theta, active, inactive }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

impl<F: Float> Regularizer<F> {
    /// `mu` when the penalty has an l1 part, zero otherwise.
    pub fn mu(&self) -> F {
        match *self {
            Regularizer::L1 { mu } | Regularizer::L1NonNeg { mu } => mu,
            Regularizer::NonNeg => F::zero(),
        }
    }

    /// True when the penalty constrains `x` to the nonnegative orthant.
    pub fn has_nonneg(&self) -> bool {
        matches!(self, Regularizer::NonNeg | Regularizer::L1NonNeg { .. })
    }

    /// Check the structural invariant (`mu > 0` where an l1 part exists).
    pub fn validate(&self) -> Result<()> {
        match *self {
            Regularizer::L1 { mu } | Regularizer::L1NonNeg { mu } => {
                if !(mu > F::zero()) || !mu.is_finite() {
                    return Err(Error::Config(format!("mu must be positive and finite, got {mu}")));
                }
            }
            Regularizer::NonNeg => {}
        }
        Ok(())
    }

    /// Soft threshold `t = scale * mu` used by the prox of `scale * phi`.
    #[inline]
    pub fn threshold(&self, scale: F) -> F {
        scale * self.mu()
    }

    #[inline]
    fn prox_coord(&self, t: F, u: F) -> F {
        match self {
            Regularizer::L1 { .. } => {
                let a = u.abs() - t;
                if a > F::zero() {
                    // sign(u) * (|u| - t); multiplying by +-1 is exact
                    if u < F::zero() {
                        -a
                    } else {
                        a
                    }
                } else {
                    F::zero()
                }
            }
            Regularizer::NonNeg => {
                if u > F::zero() {
                    u
                } else {
                    F::zero()
                }
            }
            Regularizer::L1NonNeg { .. } => {
                // soft threshold after orthant projection = max(u - t, 0)
                let a = u - t;
                if a > F::zero() {
                    a
                } else {
                    F::zero()
                }
            }
        }
    }

    /// Proximal map of `scale * phi`: the unique minimizer of
    /// `scale * phi(x) + 0.5 * ||x - u||^2`, coordinate-wise.
    ///
    /// `scale` must be positive and finite; non-finite entries of `u` are an
    /// input error.
    pub fn prox(&self, scale: F, u: &[F]) -> Result<Vec<F>> {
        debug_assert!(scale > F::zero() && scale.is_finite());
        if !crate::linalg::all_finite(u) {
            return Err(Error::NonFinite { context: "prox input" });
        }
        let t = self.threshold(scale);
        Ok(u.iter().map(|&ui| self.prox_coord(t, ui)).collect())
    }

    /// Prox of the Fenchel conjugate of `scale * phi`, via the Moreau
    /// decomposition: `prox_conjugate(u) = u - prox(u)` coordinate by
    /// coordinate, so the two recompose to `u` exactly in floating point.
    pub fn prox_conjugate(&self, scale: F, u: &[F]) -> Result<Vec<F>> {
        let p = self.prox(scale, u)?;
        Ok(u.iter().zip(&p).map(|(&ui, &pi)| ui - pi).collect())
    }

    /// Moreau envelope of `scale * phi` at `u`:
    /// `scale * phi(p) + 0.5 * ||p - u||^2` with `p = prox(scale, u)`.
    pub fn moreau_envelope(&self, scale: F, u: &[F]) -> Result<F> {
        let p = self.prox(scale, u)?;
        let half = cast::<F>(0.5);
        let quad: F = p.iter().zip(u).map(|(&pi, &ui)| half * (pi - ui) * (pi - ui)).sum();
        // p is always feasible, so value(p) is finite
        Ok(scale * self.value(&p) + quad)
    }

    /// One element of the B-subdifferential of `prox(scale, .)` at `u`,
    /// as a 0/1 diagonal.  Boundary coordinates (where the prox is not
    /// differentiable) deterministically select 0.
    pub fn bsub_diag(&self, scale: F, u: &[F]) -> JacobianDiag {
        debug_assert!(scale > F::zero() && scale.is_finite());
        let t = self.threshold(scale);
        let theta = u
            .iter()
            .map(|&ui| match self {
                Regularizer::L1 { .. } => ui.abs() > t,
                Regularizer::NonNeg => ui > F::zero(),
                // product of the two factors: orthant selector at u times the
                // l1 selector at the projected point, which collapses to u > t
                Regularizer::L1NonNeg { .. } => ui > t,
            })
            .collect();
        JacobianDiag::from_theta(theta)
    }

    /// Penalty value `phi(x)`; `+inf` when `x` violates the orthant
    /// constraint.
    pub fn value(&self, x: &[F]) -> F {
        if self.has_nonneg() && x.iter().any(|&xi| xi < F::zero()) {
            return F::infinity();
        }
        match *self {
            Regularizer::NonNeg => F::zero(),
            Regularizer::L1 { mu } | Regularizer::L1NonNeg { mu } => {
                mu * x.iter().map(|&xi| xi.abs()).sum::<F>()
            }
        }
    }
}
