use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for ratings, scores and metric values.
///
/// Implemented for `f32` and `f64`. Everything numeric in this crate is
/// generic over it; the crate root exports `f64` aliases for the common case.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from a count or index.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable as float")
    }

    fn of_f64(x: f64) -> Self {
        Self::from_f64(x).expect("f64 representable as scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sums in iteration order. Used wherever results must be reproducible
/// independent of how per-entity terms were produced.
pub(crate) fn ordered_sum<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    values.into_iter().fold(S::zero(), |acc, x| acc + x)
}

/// Arithmetic mean, zero for an empty input.
pub(crate) fn mean<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    let mut n = 0usize;
    let total = ordered_sum(values.into_iter().inspect(|_| n += 1));
    if n == 0 {
        S::zero()
    } else {
        total / S::of_usize(n)
    }
}
