//! Scalar abstraction for the valuation and risk math: `f32` or `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar used by the economics, market, and credit models.
pub trait Real: Float + FromPrimitive + NumAssign + Debug + Display {
    /// Converts a transfer count or limit into the scalar domain.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable as scalar")
    }

    fn half() -> Self {
        Self::from_f64(0.5).expect("0.5 representable")
    }

    fn hundred() -> Self {
        Self::from_count(100)
    }
}

impl<T> Real for T where T: Float + FromPrimitive + NumAssign + Debug + Display {}
