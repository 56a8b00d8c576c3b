//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the models and solvers are generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Slack allowed on probability vectors (sum-to-one, non-negativity).
    fn prob_tolerance() -> Self;

    /// Pivot / feasibility threshold for the exact game solver.
    fn pivot_tolerance() -> Self;

    /// Target duality gap for certified game solutions.
    fn gap_tolerance() -> Self;

    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to float")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn prob_tolerance() -> Self {
        1e-12
    }
    fn pivot_tolerance() -> Self {
        1e-12
    }
    fn gap_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn prob_tolerance() -> Self {
        1e-5
    }
    fn pivot_tolerance() -> Self {
        1e-6
    }
    fn gap_tolerance() -> Self {
        1e-4
    }
}
