//! Floating-point abstraction shared by scores, curves, and models.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used for scores, rates and model parameters: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize always converts to a float")
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 always converts to a float")
    }

    fn ratio(num: usize, den: usize) -> Self {
        Self::from_usize_lossy(num) / Self::from_usize_lossy(den)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
