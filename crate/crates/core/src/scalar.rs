//! Scalar abstraction for the numerical kernels.
//!
//! Everything downstream (shooting, quadrature, eigen solves, the 3D
//! reduction) is written against [`Real`] so the whole pipeline can be
//! instantiated at `f32` or `f64`. Production runs use `f64`; the `f32`
//! instantiation exists mainly to keep the kernels honest about scale
//! (see the smoke tests at the crate root).

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Shorthand for lossless-enough conversion of literal constants.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range for scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize out of range for scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Convenience free function mirroring [`Real::lit`].
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
