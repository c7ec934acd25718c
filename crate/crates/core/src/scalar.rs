//! Scalar abstraction for the numeric parts of the crate.
//!
//! Everything that scores, optimizes, or measures is generic over
//! [`Real`]; the crate root pins the default precision used by the
//! pipeline types and the CLI.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point scalar: f32 or f64.
pub trait Real:
    Float + FromPrimitive + Debug + Display + Serialize + DeserializeOwned + Send + Sync + 'static
{
    /// Lossless-enough conversion from an integer count.
    fn from_count(c: u64) -> Self {
        Self::from_u64(c).expect("count representable as float")
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 representable")
    }

    fn ln_10() -> Self {
        Self::from_f64_lossy(std::f64::consts::LN_10)
    }

    fn half() -> Self {
        Self::from_f64_lossy(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Total-order comparison for scalars that are known to be non-NaN.
pub fn cmp_real<T: Real>(a: &T, b: &T) -> std::cmp::Ordering {
    a.partial_cmp(b).expect("NaN in comparison")
}
