//! Small dense linear-algebra kernels: slice-level vector ops, a column-major
//! dense matrix with Cholesky factorization, and matrix-free conjugate
//! gradients.  Everything here is deliberately plain: the systems this crate
//! factors are formed explicitly per Newton step and stay at modest size.

use crate::error::{Error, Result};
use crate::float::{cast, Float};

/// Euclidean inner product.
#[inline]
pub fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub fn norm2<F: Float>(a: &[F]) -> F {
    dot(a, a).sqrt()
}

/// Max-absolute-value norm; zero for the empty slice.
#[inline]
pub fn norm_inf<F: Float>(a: &[F]) -> F {
    a.iter().fold(F::zero(), |m, &x| m.max(x.abs()))
}

/// `y += alpha * x`.
#[inline]
pub fn axpy<F: Float>(alpha: F, x: &[F], y: &mut [F]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Euclidean distance between two vectors.
#[inline]
pub fn dist2<F: Float>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<F>()
        .sqrt()
}

/// True if every entry is finite.
#[inline]
pub fn all_finite<F: Float>(a: &[F]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Dense square matrix in column-major order, used for the explicitly formed
/// Newton systems (`I + c * A_I A_I^T` and friends).
#[derive(Clone, Debug)]
pub struct DenseMatrix<F> {
    pub dim: usize,
    /// Column-major entries, `data[i + j * dim]` is row `i`, column `j`.
    pub data: Vec<F>,
}

impl<F: Float> DenseMatrix<F> {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix { dim, data: vec![F::zero(); dim * dim] }
    }

    /// Identity matrix.
    pub fn eye(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            m.data[j + j * dim] = F::one();
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i + j * self.dim]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i + j * self.dim] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: F) {
        self.data[i + j * self.dim] += v;
    }

    /// `out = self * x`.
    pub fn matvec(&self, x: &[F], out: &mut [F]) {
        let n = self.dim;
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        out.fill(F::zero());
        for j in 0..n {
            let xj = x[j];
            if xj != F::zero() {
                let col = &self.data[j * n..(j + 1) * n];
                axpy(xj, col, out);
            }
        }
    }

    /// In-place lower Cholesky factorization `self = L L^T`.
    ///
    /// On success the lower triangle holds `L` (the strict upper triangle is
    /// left untouched and must not be read afterwards).  Fails with a
    /// factorization error naming `strategy` if a pivot is non-positive or
    /// non-finite, i.e. the matrix was not numerically positive definite.
    pub fn cholesky_in_place(&mut self, strategy: &'static str) -> Result<()> {
        let n = self.dim;
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                let ljk = self.get(j, k);
                d -= ljk * ljk;
            }
            if !(d > F::zero()) || !d.is_finite() {
                return Err(Error::Factorization { strategy, index: j });
            }
            let ljj = d.sqrt();
            self.set(j, j, ljj);
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= self.get(i, k) * self.get(j, k);
                }
                self.set(i, j, s / ljj);
            }
        }
        Ok(())
    }

    /// Solve `L L^T x = b` given the factor produced by `cholesky_in_place`.
    pub fn cholesky_solve(&self, b: &[F]) -> Vec<F> {
        let n = self.dim;
        debug_assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        // forward: L y = b
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.get(i, k) * x[k];
            }
            x[i] = s / self.get(i, i);
        }
        // backward: L^T x = y
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.get(k, i) * x[k];
            }
            x[i] = s / self.get(i, i);
        }
        x
    }
}

/// Outcome of a conjugate-gradient solve.
#[derive(Clone, Debug)]
pub struct CgOutcome<F> {
    pub x: Vec<F>,
    pub iterations: usize,
    pub residual_norm: F,
    pub converged: bool,
}

/// Conjugate gradients for `M x = rhs` with `M` given only through
/// `apply(v, out)` (must be symmetric positive definite).
///
/// Starts from `x = 0`, stops when the residual 2-norm drops to `tol`, and
/// returns the iterate with the smallest residual seen if the iteration cap is
/// reached first.
pub fn conjugate_gradient<F: Float>(
    apply: &mut dyn FnMut(&[F], &mut [F]),
    rhs: &[F],
    tol: F,
    max_iter: usize,
) -> CgOutcome<F> {
    let n = rhs.len();
    let mut x = vec![F::zero(); n];
    let mut r = rhs.to_vec(); // residual b - M*0
    let mut rs = dot(&r, &r);
    let mut best_x = x.clone();
    let mut best_res = rs.sqrt();
    if best_res <= tol {
        return CgOutcome { x, iterations: 0, residual_norm: best_res, converged: true };
    }
    let mut p = r.clone();
    let mut mp = vec![F::zero(); n];
    for it in 1..=max_iter {
        apply(&p, &mut mp);
        let denom = dot(&p, &mp);
        if !(denom > F::zero()) || !denom.is_finite() {
            // operator not SPD or breakdown: return the best iterate so far
            return CgOutcome { x: best_x, iterations: it, residual_norm: best_res, converged: false };
        }
        let alpha = rs / denom;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &mp, &mut r);
        let rs_new = dot(&r, &r);
        let res = rs_new.sqrt();
        if res < best_res {
            best_res = res;
            best_x.copy_from_slice(&x);
        }
        if res <= tol {
            return CgOutcome { x, iterations: it, residual_norm: res, converged: true };
        }
        let beta = rs_new / rs;
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rs = rs_new;
    }
    CgOutcome { x: best_x, iterations: max_iter, residual_norm: best_res, converged: false }
}

/// Default CG iteration budget for an operator of the given dimension.
pub fn cg_iteration_cap(dim: usize) -> usize {
    (10 * dim.max(1)).min(10_000)
}

/// Deterministic pseudo-random stream used where the library itself needs
/// arbitrary-but-reproducible vectors (power iteration).  SplitMix64.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform sample in `(-1, 1)`.
    pub fn next_signed_unit<F: Float>(&mut self) -> F {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64; // [0,1)
        cast::<F>(2.0 * u - 1.0)
    }
}
