//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, Signed, ToPrimitive};

/// Floating-point type the solvers are generic over (`f32` or `f64`).
///
/// Tolerances throughout the crate are stated for `f64`; `f32` works for
/// the closed-form pieces but will not meet the tighter verification gates.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Signed
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("integer representable in scalar type")
}

#[inline]
pub fn from_i64<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("integer representable in scalar type")
}

#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Reduces `x` to `[0, 1)`.
#[inline]
pub fn frac<T: Scalar>(x: T) -> T {
    let f = x - x.floor();
    if f >= T::one() {
        T::zero()
    } else {
        f
    }
}

/// Signed distance of `x` to the nearest integer, in `[-1/2, 1/2]`.
#[inline]
pub fn centered_frac<T: Scalar>(x: T) -> T {
    x - x.round()
}

/// `2π`
#[inline]
pub fn tau<T: Scalar>() -> T {
    T::PI() + T::PI()
}
