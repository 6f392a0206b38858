//! Floating-point abstraction: everything downstream is generic over [`Scalar`],
//! which is implemented for `f32` and `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

/// Real scalar type the library is generic over.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssignOps
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal into this scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }

    /// Lossy conversion back to `f64` (exact for `f32`/`f64`).
    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}
