//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra as na;
use num_traits as nt;

/// Real floating point scalar usable throughout the library (`f32` or `f64`).
pub trait Real:
    Copy
    + na::RealField
    + na::Scalar
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::ToPrimitive
    + Send
    + Sync
    + std::fmt::Display
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self;

    /// Lossy conversion to `f64` for reporting.
    fn to_f64_lossy(self) -> f64;
}

macro_rules! impl_real {
    ($f:ty) => {
        impl Real for $f {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $f
            }

            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Complex scalar over a [`Real`].
pub type Cplx<T> = num_complex::Complex<T>;

#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
