//! Numeric traits the model is generic over.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// A number the exact enumeration can run in: `f32`, `f64`, or an exact
/// rational such as [`crate::Rational`].
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync
{
    /// `numer / denom`, exact when the scalar is rational.
    fn ratio(numer: i64, denom: i64) -> Self {
        let n = Self::from_i64(numer).expect("integer representable in scalar");
        let d = Self::from_i64(denom).expect("integer representable in scalar");
        n / d
    }

    /// Converts a probability given as a float. Rational scalars recover short
    /// decimals exactly (`0.1` becomes `1/10`).
    fn from_probability(p: f64) -> Option<Self> {
        Self::from_f64(p)
    }
}

impl<T> Scalar for T where
    T: Num
        + Signed
        + Clone
        + PartialOrd
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Send
        + Sync
{
}

/// Floating-point scalar for estimators that need square roots.
pub trait Real: Scalar + Float + Copy {}

impl Real for f32 {}
impl Real for f64 {}
