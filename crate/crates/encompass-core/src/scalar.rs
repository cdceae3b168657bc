//! Scalar abstraction for the numeric kernels.
//!
//! All estimation and transformation code is generic over [`Scalar`] so the
//! same routines run in `f64` (the default everywhere) or `f32`. Concrete
//! aliases live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by every numeric routine in this crate.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from `f64` literals (tolerances, percentages).
    fn from_f64_lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Conversion from counts.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
