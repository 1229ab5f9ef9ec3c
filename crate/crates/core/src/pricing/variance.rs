//! Payoffs on annualized realized variance, priced off the lift's marginal.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Result, VolspecError};
use crate::lift::{model_joint, JointDiagnostics, LiftParams, VariancePdf};
use crate::model::Model;

/// `h(Sigma)` for realized variance `Sigma`.
#[derive(Clone)]
pub enum VariancePayoff {
    /// `Sigma`; its price is the fair variance strike.
    VarSwap,
    /// `sqrt(Sigma)`; its price is the fair volatility strike.
    VolSwap,
    VarSwaption { strike: f64 },
    VolSwaption { strike: f64 },
    /// `min(sqrt(Sigma), cap) - strike`.
    CappedVolSwap { strike: f64, cap: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for VariancePayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VarSwap => write!(f, "VarSwap"),
            Self::VolSwap => write!(f, "VolSwap"),
            Self::VarSwaption { strike } => write!(f, "VarSwaption({strike})"),
            Self::VolSwaption { strike } => write!(f, "VolSwaption({strike})"),
            Self::CappedVolSwap { strike, cap } => write!(f, "CappedVolSwap({strike}, {cap})"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl VariancePayoff {
    pub fn validate(&self) -> Result<()> {
        let bad = match *self {
            Self::VarSwaption { strike } | Self::VolSwaption { strike } => !(strike >= 0.0),
            Self::CappedVolSwap { strike, cap } => !(strike >= 0.0 && cap > 0.0),
            _ => false,
        };
        if bad {
            return Err(VolspecError::Domain(format!("invalid variance payoff {self:?}")));
        }
        Ok(())
    }

    pub fn evaluate(&self, sigma2: f64) -> f64 {
        let s2 = sigma2.max(0.0);
        match self {
            Self::VarSwap => s2,
            Self::VolSwap => s2.sqrt(),
            Self::VarSwaption { strike } => (s2 - strike).max(0.0),
            Self::VolSwaption { strike } => (s2.sqrt() - strike).max(0.0),
            Self::CappedVolSwap { strike, cap } => s2.sqrt().min(*cap) - strike,
            Self::Custom(h) => h(s2),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::VarSwap => "var_swap",
            Self::VolSwap => "vol_swap",
            Self::VarSwaption { .. } => "var_swaption",
            Self::VolSwaption { .. } => "vol_swaption",
            Self::CappedVolSwap { .. } => "capped_vol_swap",
            Self::Custom(_) => "custom",
        }
    }
}

/// Quotes a variance-unit value as volatility percent, `100 sqrt(v)`.
pub fn vol_terms(variance: f64) -> f64 {
    100.0 * variance.max(0.0).sqrt()
}

/// Discounted expectation of a payoff under a variance distribution.
pub fn price_on_pdf(pdf: &VariancePdf, payoff: &VariancePayoff, discount: f64) -> Result<f64> {
    payoff.validate()?;
    Ok(discount * pdf.expectation(|s| payoff.evaluate(s)))
}

pub fn fair_variance_strike(pdf: &VariancePdf) -> f64 {
    pdf.mean()
}

pub fn fair_volatility_strike(pdf: &VariancePdf) -> f64 {
    pdf.expectation(|s| s.max(0.0).sqrt())
}

/// Realized-variance distribution with the lift diagnostics behind it.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceDistribution {
    pub pdf: VariancePdf,
    /// Bucket count actually used; exceeds `2C + 1` when the lattice had to
    /// be widened.
    pub buckets: usize,
    pub leakage: f64,
    pub diagnostics: JointDiagnostics,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VariancePrice {
    pub price: f64,
    pub buckets: usize,
    pub leakage: f64,
    pub diagnostics: JointDiagnostics,
}

/// Realized variance over calendar `[t, maturity]` from the model's start
/// state, with the leakage guard applied.
pub fn variance_distribution(model: &Model, t: f64, maturity: f64, params: &LiftParams) -> Result<VarianceDistribution> {
    let jd = model_joint(model, t, maturity, params)?;
    Ok(VarianceDistribution {
        pdf: jd.variance_pdf(),
        buckets: jd.n_buckets(),
        leakage: jd.leakage_probability(params.leakage_buckets),
        diagnostics: jd.diagnostics(),
    })
}

pub fn price_variance_derivative(
    payoff: &VariancePayoff,
    t: f64,
    maturity: f64,
    model: &Model,
    params: &LiftParams,
) -> Result<VariancePrice> {
    payoff.validate()?;
    let dist = variance_distribution(model, t, maturity, params)?;
    Ok(VariancePrice {
        price: price_on_pdf(&dist.pdf, payoff, model.discount().discount(t, maturity))?,
        buckets: dist.buckets,
        leakage: dist.leakage,
        diagnostics: dist.diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pdf(labels: &[f64], weights: &[f64]) -> VariancePdf {
        VariancePdf { labels: labels.to_vec(), weights: weights.to_vec() }
    }

    #[test]
    fn payoff_values() {
        assert_eq!(VariancePayoff::VarSwap.evaluate(0.04), 0.04);
        assert_eq!(VariancePayoff::VolSwap.evaluate(0.04), 0.2);
        assert_eq!(VariancePayoff::VarSwaption { strike: 0.05 }.evaluate(0.04), 0.0);
        assert!((VariancePayoff::VolSwaption { strike: 0.1 }.evaluate(0.04) - 0.1).abs() < 1e-15);
        assert!((VariancePayoff::CappedVolSwap { strike: 0.1, cap: 0.15 }.evaluate(0.04) - 0.05).abs() < 1e-15);
        assert_eq!(VariancePayoff::Custom(Arc::new(|s| 2.0 * s)).evaluate(0.5), 1.0);
    }

    #[test]
    fn negative_strikes_are_rejected() {
        assert!(VariancePayoff::VarSwaption { strike: -1.0 }.validate().is_err());
        assert!(VariancePayoff::CappedVolSwap { strike: 0.1, cap: 0.0 }.validate().is_err());
    }

    #[test]
    fn zero_strike_swaption_is_the_var_swap() {
        let p = pdf(&[0.0, 0.01, 0.02, 0.05], &[0.1, 0.4, 0.3, 0.2]);
        let swaption = price_on_pdf(&p, &VariancePayoff::VarSwaption { strike: 0.0 }, 1.0).unwrap();
        assert!((swaption - fair_variance_strike(&p)).abs() < 1e-16);
    }

    #[test]
    fn vol_terms_quote() {
        assert!((vol_terms(0.0225) - 15.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn jensen_and_monotone_swaptions(
            w in proptest::collection::vec(0.01..1.0f64, 3..20),
            k1 in 0.0..0.1f64, dk in 0.0..0.1f64,
        ) {
            let total: f64 = w.iter().sum();
            let weights: Vec<f64> = w.iter().map(|x| x / total).collect();
            let labels: Vec<f64> = (0..weights.len()).map(|d| 0.004 * d as f64).collect();
            let p = pdf(&labels, &weights);
            prop_assert!(fair_volatility_strike(&p) < fair_variance_strike(&p).sqrt());
            let a = price_on_pdf(&p, &VariancePayoff::VarSwaption { strike: k1 }, 1.0).unwrap();
            let b = price_on_pdf(&p, &VariancePayoff::VarSwaption { strike: k1 + dk }, 1.0).unwrap();
            prop_assert!(b <= a + 1e-15);
        }
    }
}
