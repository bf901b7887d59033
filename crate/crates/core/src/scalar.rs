use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the solvers are generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Default KKT tolerance of the inner solver at this precision.
    const DEFAULT_TOLERANCE: f64;

    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for finite literals with `f32`/`f64`.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn default_tolerance() -> Self {
        Self::of(Self::DEFAULT_TOLERANCE)
    }
}

impl Scalar for f64 {
    const DEFAULT_TOLERANCE: f64 = 1e-10;
}

impl Scalar for f32 {
    const DEFAULT_TOLERANCE: f64 = 1e-5;
}
