//! Floating-point scalar abstraction.
//!
//! The numeric kernels in this crate are generic over [`Real`] so they can be
//! instantiated at `f32` or `f64`; the rest of the workspace uses the concrete
//! [`Scalar`] alias because all serialized artifacts are raw doubles.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar usable by the generic numeric kernels.
pub trait Real:
    Float + FromPrimitive + NumAssign + AddAssign + SubAssign + MulAssign + DivAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literals inside generic code.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal must be representable")
    }
    /// Lossy conversion to `f64`, used when handing values to serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Concrete scalar used throughout the domain crates.
pub type Scalar = f64;
