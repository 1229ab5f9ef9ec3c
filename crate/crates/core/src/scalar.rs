use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst};

/// Floating-point scalar accepted by the generic parts of the crate.
pub trait Real: Float + FloatConst + Sum + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` literal. Panics only for types that cannot hold a
    /// finite `f64`, which no implementor does.
    fn lit(x: f64) -> Self {
        Self::from(x).expect("literal representable")
    }

    fn from_usize(n: usize) -> Self {
        Self::from(n).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
