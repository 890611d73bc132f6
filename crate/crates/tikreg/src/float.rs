//! Scalar abstraction: every numeric routine in this crate is generic over
//! [`Float`], which both `f32` and `f64` satisfy.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar usable throughout the crate.
///
/// This is a thin umbrella over the `num-traits` hierarchy; it exists so that
/// signatures can say `F: Float` instead of repeating the full bound list.
pub trait Float:
    num_traits::Float
    + num_traits::NumAssign
    + num_traits::FromPrimitive
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Float for T where
    T: num_traits::Float
        + num_traits::NumAssign
        + num_traits::FromPrimitive
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Convert an `f64` constant into the working scalar type.
///
/// Panics only if `F` cannot represent ordinary finite constants, which cannot
/// happen for the float types this crate is instantiated with.
#[inline]
pub fn cast<F: Float>(x: f64) -> F {
    F::from_f64(x).expect("constant must be representable in the scalar type")
}
