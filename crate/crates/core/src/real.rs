use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar usable by the numerical kernels: `f32` or `f64`.
///
/// Besides the `num-traits` float surface this carries the two special
/// functions the kernels build on, so that every implementation can route to
/// the precision-appropriate libm routine.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Complementary error function.
    fn erfc(self) -> Self;
    /// Natural log of |Γ(x)|.
    fn ln_gamma(self) -> Self;

    /// Converts an `f64` constant into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }
}

impl Real for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
    #[inline]
    fn ln_gamma(self) -> Self {
        libm::lgamma(self)
    }
}

impl Real for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
    #[inline]
    fn ln_gamma(self) -> Self {
        libm::lgammaf(self)
    }
}

/// Lossy conversion for error messages.
pub(crate) fn show<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
