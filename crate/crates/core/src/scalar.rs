//! Scalar abstraction: the numeric kernels are generic over the floating
//! point type via `num-traits`, with `f64` aliases at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive};

/// Floating point scalar usable by the solvers: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + AddAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + AddAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Shorthand for converting an `f64` literal into the working scalar.
#[inline]
pub(crate) fn s<S: Real>(x: f64) -> S {
    S::from_f64(x).expect("literal representable in scalar type")
}
