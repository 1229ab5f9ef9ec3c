//! Pricing on top of the spot kernel and the realized-variance lift.

pub mod black_scholes;
pub mod european;
pub mod forward_start;
pub mod variance;
pub mod vix;

pub use black_scholes::{bs_price, implied_vol, norm_cdf, BsInputs, OptionKind};
pub use european::{
    greeks_for_payoff, greeks_profile, price_european, price_vanilla, price_vanilla_from, terminal_spots,
    vanilla_smile, GreekPoint, Priced, SmilePoint, VanillaSpec,
};
pub use forward_start::{forward_implied_vol, forward_smile, price_forward_start, ForwardSmilePoint, ForwardStartSpec};
pub use variance::{
    fair_variance_strike, fair_volatility_strike, price_on_pdf, price_variance_derivative, variance_distribution,
    vol_terms, VarianceDistribution, VariancePayoff, VariancePrice,
};
pub use vix::{
    log_contract, log_contract_from, portfolio, portfolio_from, vix_pdf, vix_portfolio, LogContract, StrikeGrid,
    TerminalDistribution, VixPdf, VixSpec, VixValue,
};

use serde::Serialize;

/// Health numbers attached to every report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ReportDiagnostics {
    pub mass: f64,
    pub residue: f64,
    pub leakage: Option<f64>,
}

/// One priced product as written to JSON.
#[derive(Debug, Clone, Serialize)]
pub struct PriceReport {
    pub product: String,
    pub inputs: serde_json::Value,
    pub price: f64,
    pub vol_terms: Option<f64>,
    pub diagnostics: ReportDiagnostics,
}
