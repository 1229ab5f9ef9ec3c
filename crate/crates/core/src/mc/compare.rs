//! Side-by-side Monte Carlo and spectral prices of the variance products.

use std::time::Instant;

use serde::Serialize;

use super::{mc_price, simulate, PathConfig};
use crate::error::Result;
use crate::lift::LiftParams;
use crate::model::Model;
use crate::pricing::{price_on_pdf, variance_distribution, vol_terms, VariancePayoff};
use crate::spectral::KernelDiagnostics;

/// One method at one maturity. Swap columns are in vol terms; option
/// columns are variance-unit prices times 100.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub maturity: f64,
    pub method: String,
    pub var_swap: f64,
    pub vol_swap: f64,
    pub options: Vec<f64>,
    /// Standard errors in the same units; empty for the spectral row.
    pub std_errors: Vec<f64>,
    /// Wall time of the method, shared by the rows it produced.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    /// Option moneyness `a`; strikes are `(a K_0)^2` with `K_0` the spectral
    /// `sqrt(E[Sigma_T])`.
    pub moneyness: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
    pub kernel_diagnostics: KernelDiagnostics,
    pub max_leakage: f64,
}

impl ComparisonTable {
    pub fn row(&self, maturity: f64, spectral: bool) -> Option<&ComparisonRow> {
        self.rows
            .iter()
            .find(|r| r.maturity == maturity && (r.method == "spectral") == spectral)
    }
}

/// Prices the swap, vol swap and swaptions at each maturity both ways. All
/// maturities share one simulation to the longest of them.
pub fn compare(
    model: &Model,
    maturities: &[f64],
    paths: &PathConfig,
    lift: &LiftParams,
    moneyness: &[f64],
) -> Result<ComparisonTable> {
    let clock = Instant::now();
    let mut spectral = Vec::new();
    let mut strikes = Vec::new();
    let mut max_leakage = 0.0_f64;
    for &t in maturities {
        let dist = variance_distribution(model, 0.0, t, lift)?;
        max_leakage = max_leakage.max(dist.leakage);
        let df = model.discount().discount(0.0, t);
        let var = price_on_pdf(&dist.pdf, &VariancePayoff::VarSwap, df)?;
        let vol = price_on_pdf(&dist.pdf, &VariancePayoff::VolSwap, df)?;
        let ks: Vec<f64> = moneyness.iter().map(|a| (a * var.sqrt()).powi(2)).collect();
        let options = ks
            .iter()
            .map(|&k| Ok(100.0 * price_on_pdf(&dist.pdf, &VariancePayoff::VarSwaption { strike: k }, df)?))
            .collect::<Result<Vec<_>>>()?;
        strikes.push(ks);
        spectral.push(ComparisonRow {
            maturity: t,
            method: "spectral".into(),
            var_swap: vol_terms(var),
            vol_swap: 100.0 * vol,
            options,
            std_errors: Vec::new(),
            seconds: 0.0,
        });
    }
    let spectral_seconds = clock.elapsed().as_secs_f64();
    spectral.iter_mut().for_each(|r| r.seconds = spectral_seconds);

    let clock = Instant::now();
    let horizon = maturities.iter().copied().fold(0.0, f64::max);
    let config = PathConfig { horizon, ..*paths };
    let sim = simulate(model, &config, maturities)?;
    let mut rows = Vec::new();
    for ((sample, ks), spec_row) in sim.samples.iter().zip(&strikes).zip(spectral) {
        let df = model.discount().discount(0.0, sample.maturity);
        let var = mc_price(sample, &VariancePayoff::VarSwap)?;
        let vol = mc_price(sample, &VariancePayoff::VolSwap)?;
        let (var_vol, var_se) = var.vol_terms();
        let mut options = Vec::new();
        let mut std_errors = vec![var_se, 100.0 * df * vol.std_error];
        for &k in ks {
            let e = mc_price(sample, &VariancePayoff::VarSwaption { strike: k })?;
            options.push(100.0 * df * e.mean);
            std_errors.push(100.0 * df * e.std_error);
        }
        rows.push(ComparisonRow {
            maturity: sample.maturity,
            method: format!("mc_{}_paths", config.n_paths),
            var_swap: var_vol,
            vol_swap: 100.0 * df * vol.mean,
            options,
            std_errors,
            seconds: 0.0,
        });
        rows.push(spec_row);
    }
    let mc_seconds = clock.elapsed().as_secs_f64();
    rows.iter_mut()
        .filter(|r| r.method != "spectral")
        .for_each(|r| r.seconds = mc_seconds);

    Ok(ComparisonTable {
        moneyness: moneyness.to_vec(),
        rows,
        kernel_diagnostics: sim.kernel_diagnostics,
        max_leakage,
    })
}
