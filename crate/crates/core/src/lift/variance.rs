//! Instantaneous variance and the variance-bucket lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VolspecError};
use crate::model::MarkovGenerator;
use crate::TimeChange;

/// Squared volatility scale that sets the bucket spacing: `0.42^2`.
pub const ALPHA_SCALE: f64 = 0.1764;

/// `Q(x) = sum_y ((F(y) - F(x)) / F(x))^2 L(x, y)`, the instantaneous
/// variance of relative moves out of each state.
pub fn instantaneous_variance(gen: &MarkovGenerator, levels: &[f64]) -> Result<Vec<f64>> {
    let n = gen.dim();
    if levels.len() != n {
        return Err(VolspecError::Config(format!(
            "{} levels for a {n}-state generator",
            levels.len()
        )));
    }
    (0..n)
        .map(|x| {
            let fx = levels[x];
            if !(fx > 0.0) {
                return Err(VolspecError::Domain(format!("level {fx} at state {x} is not positive")));
            }
            let q: f64 = (0..n)
                .filter(|&y| y != x && levels[y] != fx)
                .map(|y| ((levels[y] - fx) / fx).powi(2) * gen.rate(x, y))
                .sum();
            if q < -1e-12 {
                return Err(VolspecError::Numerical(format!(
                    "negative instantaneous variance {q:.3e} at state {x}"
                )));
            }
            Ok(q.max(0.0))
        })
        .collect()
}

/// `alpha(t) = 0.1764 f(t) / C`.
pub fn alpha_schedule(t: f64, c_max: usize, tc: &TimeChange) -> f64 {
    ALPHA_SCALE * tc.eval(t) / c_max as f64
}

/// How the bucket spacing is chosen for a horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AlphaRule {
    /// `0.1764 (f(T) - f(t)) / C`.
    Schedule,
    /// A fixed spacing in variance units.
    Fixed(f64),
}

impl std::str::FromStr for AlphaRule {
    type Err = VolspecError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "schedule" {
            return Ok(AlphaRule::Schedule);
        }
        let v = s
            .strip_prefix("fixed:")
            .and_then(|v| v.parse::<f64>().ok())
            .filter(|v| *v > 0.0 && v.is_finite())
            .ok_or_else(|| {
                VolspecError::Config(format!("alpha rule {s:?} is not `schedule` or `fixed:<v>` with v > 0"))
            })?;
        Ok(AlphaRule::Fixed(v))
    }
}

/// Lift configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftParams {
    pub c_max: usize,
    pub alpha: AlphaRule,
    /// Buckets counted as the wrap-around tail.
    pub leakage_buckets: usize,
    pub leakage_error: f64,
    pub leakage_warn: f64,
    /// Diagonalize only blocks `0..=C` and conjugate the rest.
    pub conjugate_economy: bool,
    /// When the leakage guard trips, retry up to twice with `C` grown by a
    /// quarter at unchanged spacing before giving up.
    pub widen_on_leak: bool,
}

impl Default for LiftParams {
    fn default() -> Self {
        Self {
            c_max: 100,
            alpha: AlphaRule::Schedule,
            leakage_buckets: 5,
            leakage_error: 1e-4,
            leakage_warn: 1e-5,
            conjugate_economy: true,
            widen_on_leak: true,
        }
    }
}

impl LiftParams {
    pub fn with_c_max(mut self, c_max: usize) -> Self {
        self.c_max = c_max;
        self
    }

    /// Guard trips are errors, never retried.
    pub fn strict(mut self) -> Self {
        self.widen_on_leak = false;
        self
    }

    pub fn with_alpha(mut self, alpha: AlphaRule) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_max < 1 {
            return Err(VolspecError::Config("C must be at least 1".into()));
        }
        if self.leakage_buckets >= 2 * self.c_max + 1 {
            return Err(VolspecError::Config(format!(
                "leakage tail of {} buckets does not fit in {} buckets",
                self.leakage_buckets,
                2 * self.c_max + 1
            )));
        }
        if let AlphaRule::Fixed(v) = self.alpha {
            if !(v > 0.0 && v.is_finite()) {
                return Err(VolspecError::Config(format!("alpha {v} must be > 0")));
            }
        }
        Ok(())
    }

    /// Spacing for the calendar window `[t, maturity]`.
    pub fn spacing(&self, t: f64, maturity: f64, tc: &TimeChange) -> f64 {
        match self.alpha {
            AlphaRule::Schedule => ALPHA_SCALE * (tc.eval(maturity) - tc.eval(t)) / self.c_max as f64,
            AlphaRule::Fixed(v) => v,
        }
    }
}

/// Buckets `d = 0..2C` of accrued variance `I = alpha d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceGrid {
    pub c_max: usize,
    pub spacing: f64,
}

impl VarianceGrid {
    pub fn new(c_max: usize, spacing: f64) -> Result<Self> {
        if c_max < 1 || !(spacing > 0.0 && spacing.is_finite()) {
            return Err(VolspecError::Domain(format!(
                "variance grid needs C >= 1 and spacing > 0, got C={c_max}, spacing={spacing}"
            )));
        }
        Ok(Self { c_max, spacing })
    }

    pub fn n_buckets(&self) -> usize {
        2 * self.c_max + 1
    }

    /// Phase `p_k = 2 pi k / (2C + 1)`.
    pub fn phase(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.n_buckets() as f64
    }

    /// Annualized realized variance of bucket `d` over a calendar window.
    pub fn label(&self, d: usize, window: f64) -> f64 {
        self.spacing * d as f64 / window
    }
}
