//! Floating-point abstraction: the numerical core is generic over `f32`/`f64`.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};
use rustfft::FftNum;
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Scalar type every field, norm and solver is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssignOps
    + FftNum
    + Sum
    + Display
    + LowerExp
    + Debug
    + Default
    + 'static
{
    /// Convert a literal constant; panics only on non-finite input.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite constant")
    }

    #[inline]
    fn two() -> Self {
        Self::of(2.0)
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the generic scalar.
pub type C<T> = Complex<T>;

/// `i` as a complex constant.
#[inline]
pub fn imag_unit<T: Real>() -> C<T> {
    C::new(T::zero(), T::one())
}
