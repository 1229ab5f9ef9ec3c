//! Black-Scholes on spot with flat rate and dividend yield, and its inversion.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Result, VolspecError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

impl std::str::FromStr for OptionKind {
    type Err = VolspecError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "call" => Ok(OptionKind::Call),
            "put" => Ok(OptionKind::Put),
            _ => Err(VolspecError::Config(format!("option kind {s:?} is not call or put"))),
        }
    }
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inputs of one Black-Scholes quote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsInputs {
    pub kind: OptionKind,
    pub spot: f64,
    pub strike: f64,
    pub maturity: f64,
    pub rate: f64,
    pub dividend: f64,
}

impl BsInputs {
    fn forward(&self) -> f64 {
        self.spot * ((self.rate - self.dividend) * self.maturity).exp()
    }

    fn df(&self) -> f64 {
        (-self.rate * self.maturity).exp()
    }

    /// Value at zero volatility.
    pub fn intrinsic(&self) -> f64 {
        let f = self.forward();
        self.df()
            * match self.kind {
                OptionKind::Call => (f - self.strike).max(0.0),
                OptionKind::Put => (self.strike - f).max(0.0),
            }
    }

    /// Supremum over volatility.
    pub fn upper_bound(&self) -> f64 {
        self.df()
            * match self.kind {
                OptionKind::Call => self.forward(),
                OptionKind::Put => self.strike,
            }
    }

    pub fn price(&self, sigma: f64) -> f64 {
        let f = self.forward();
        let sd = sigma * self.maturity.sqrt();
        if sd <= 0.0 || self.strike <= 0.0 {
            return self.intrinsic();
        }
        let d1 = ((f / self.strike).ln() + 0.5 * sd * sd) / sd;
        let d2 = d1 - sd;
        self.df()
            * match self.kind {
                OptionKind::Call => f * norm_cdf(d1) - self.strike * norm_cdf(d2),
                OptionKind::Put => self.strike * norm_cdf(-d2) - f * norm_cdf(-d1),
            }
    }

    /// dPrice / dSigma.
    pub fn vega(&self, sigma: f64) -> f64 {
        let f = self.forward();
        let sd = sigma * self.maturity.sqrt();
        if sd <= 0.0 || self.strike <= 0.0 {
            return 0.0;
        }
        let d1 = ((f / self.strike).ln() + 0.5 * sd * sd) / sd;
        self.df() * f * norm_pdf(d1) * self.maturity.sqrt()
    }
}

pub fn bs_price(inputs: &BsInputs, sigma: f64) -> f64 {
    inputs.price(sigma)
}

/// Implied volatility by Newton steps safeguarded with a bisection bracket.
///
/// Prices at (or within 1e-14 relative of) intrinsic give zero.
pub fn implied_vol(price: f64, inputs: &BsInputs) -> Result<f64> {
    if !(inputs.spot > 0.0 && inputs.strike > 0.0 && inputs.maturity > 0.0) {
        return Err(VolspecError::Domain(format!("bad Black-Scholes inputs {inputs:?}")));
    }
    let lo_price = inputs.intrinsic();
    let hi_price = inputs.upper_bound();
    let slack = 1e-14 * hi_price.max(1.0);
    if !price.is_finite() || price < lo_price - slack || price >= hi_price {
        return Err(VolspecError::Inversion(format!(
            "price {price} outside ({lo_price}, {hi_price})"
        )));
    }
    if price <= lo_price + slack {
        return Ok(0.0);
    }

    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while inputs.price(hi) < price {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(VolspecError::Inversion(format!("no volatility below 1000 reaches {price}")));
        }
    }
    let tol = 1e-14 * hi_price.max(1.0);
    let mut sigma = 0.5 * (lo + hi);
    for _ in 0..200 {
        let diff = inputs.price(sigma) - price;
        if diff.abs() <= tol {
            break;
        }
        if diff > 0.0 {
            hi = sigma;
        } else {
            lo = sigma;
        }
        let v = inputs.vega(sigma);
        let newton = sigma - diff / v;
        let next = if v > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - sigma).abs() <= 4.0 * f64::EPSILON * sigma {
            break;
        }
        sigma = next;
    }
    Ok(sigma)
}
