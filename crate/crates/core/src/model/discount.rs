//! Flat deterministic rate and dividend yield.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VolspecError};

/// Continuously compounded rate `r` and dividend yield `q`, both constant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DiscountCurve {
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub q: f64,
}

impl DiscountCurve {
    pub fn new(r: f64, q: f64) -> Result<Self> {
        if !r.is_finite() || !q.is_finite() {
            return Err(VolspecError::Config(format!("non-finite curve r={r}, q={q}")));
        }
        Ok(Self { r, q })
    }

    /// Discount factor from `T` back to `t`.
    pub fn discount(&self, t: f64, maturity: f64) -> f64 {
        (-self.r * (maturity - t)).exp()
    }

    /// Spot implied by a forward level at calendar time `t`.
    pub fn spot_from_forward(&self, forward: f64, t: f64) -> f64 {
        (-(self.r - self.q) * t).exp() * forward
    }
}
