//! Scalar abstraction for the whole toolkit.
//!
//! Everything numerical is generic over [`Real`], a plain floating-point
//! trait implemented for `f32` and `f64`. Operations that go through
//! LAPACK additionally require [`LinalgReal`] (and, where complex
//! matrices are decomposed, `Complex<T>: Lapack`), since those kernels
//! exist only for the four standard scalar types.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use ndarray_linalg::{Lapack, Scalar};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar the toolkit is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + FftNum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Real scalar whose real and complex matrices both have LAPACK kernels.
pub trait LinalgReal: Real + Lapack + Scalar<Real = Self, Complex = Complex<Self>> {}

impl LinalgReal for f32 {}
impl LinalgReal for f64 {}

/// Shorthand for converting literal constants into `T`.
///
/// Every `f64` literal used by the crate is exactly representable or
/// harmlessly rounded in `f32`, so the unwrap cannot fire.
#[inline]
pub(crate) fn r<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal convertible to scalar type")
}

// In LAPACK-bounded generics the `Scalar` supertrait shadows the
// `Float` methods of the same name; these pin the floating-point ones.

#[inline]
pub(crate) fn fabs<T: Real>(x: T) -> T {
    x.abs()
}

#[inline]
pub(crate) fn fsqrt<T: Real>(x: T) -> T {
    x.sqrt()
}

#[inline]
pub(crate) fn fexp<T: Real>(x: T) -> T {
    x.exp()
}
