//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display};

/// Floating-point scalar the numeric core is generic over.
///
/// `f64` is the default lane: the CLI and all on-disk formats use it, and the
/// determinism guarantees are stated for it. `f32` is available through the
/// aliases at the crate root for memory-constrained experimentation.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("f64 converts to scalar")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
