//! Deterministic clock from calendar to financial time.

use crate::error::{Result, VolspecError};
use crate::scalar::Real;

/// Piecewise-linear `f(t)` through knots starting at `(0, 0)`, extrapolated
/// linearly past the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChange<T> {
    knots: Vec<(T, T)>,
}

impl<T: Real> TimeChange<T> {
    pub fn identity() -> Self {
        Self {
            knots: vec![(T::zero(), T::zero()), (T::one(), T::one())],
        }
    }

    pub fn new(mut knots: Vec<(T, T)>) -> Result<Self> {
        if knots.first().map_or(true, |k| k.0 != T::zero() || k.1 != T::zero()) {
            knots.insert(0, (T::zero(), T::zero()));
        }
        if knots.len() < 2 {
            return Err(VolspecError::Config("time change needs a knot after t = 0".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(VolspecError::Config(format!(
                    "time-change knots must increase in both coordinates: ({}, {}) then ({}, {})",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(T, T)] {
        &self.knots
    }

    pub fn is_identity(&self) -> bool {
        self.knots.iter().all(|&(t, f)| t == f)
    }

    /// `f(t)`; negative `t` is clamped to 0.
    pub fn eval(&self, t: T) -> T {
        if t <= T::zero() {
            return T::zero();
        }
        let k = &self.knots;
        let seg = k
            .windows(2)
            .position(|w| t <= w[1].0)
            .unwrap_or(k.len() - 2);
        let (t0, f0) = k[seg];
        let (t1, f1) = k[seg + 1];
        f0 + (f1 - f0) * (t - t0) / (t1 - t0)
    }
}

/// Free-function form of [`TimeChange::eval`].
pub fn financial_time<T: Real>(tc: &TimeChange<T>, t: T) -> T {
    tc.eval(t)
}
