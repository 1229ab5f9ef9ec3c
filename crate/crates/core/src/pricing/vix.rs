//! The log contract, the discretized option-strip portfolio that replicates
//! it, and the distribution of the one-month index.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VolspecError};
use crate::model::Model;
use crate::spectral::KernelDiagnostics;

use super::variance::vol_terms;

/// `-(2 / (T - t)) E[log(F_T / F_t)]` from one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogContract {
    pub variance: f64,
    pub vol_terms: f64,
    pub mass: f64,
    pub residue: f64,
}

/// Log contract over calendar `[t, maturity]` started from `state`.
pub fn log_contract_from(model: &Model, state: usize, t: f64, maturity: f64) -> Result<LogContract> {
    if !(maturity > t) {
        return Err(VolspecError::Domain(format!("log contract needs T > t, got t={t}, T={maturity}")));
    }
    let (row, diag) = model.kernel_row(state, t, maturity)?;
    let levels = model.levels();
    let f0 = levels[state];
    let expectation: f64 = row
        .iter()
        .zip(levels)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, f)| p * (f / f0).ln())
        .sum();
    let variance = -2.0 * expectation / (maturity - t);
    Ok(LogContract {
        variance,
        vol_terms: vol_terms(variance),
        mass: row.iter().sum(),
        residue: diag.imaginary_residue,
    })
}

pub fn log_contract(model: &Model, maturity: f64) -> Result<LogContract> {
    log_contract_from(model, model.start_state(), 0.0, maturity)
}

/// Which strikes enter the option strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrikeGrid {
    /// Strikes `F e^{i h}` spanning the whole lattice, so `F` itself is a
    /// strike.
    LogUniform { step: f64 },
    /// Lattice levels in `[lower F, upper F]`.
    Lattice { lower: f64, upper: f64 },
    Explicit(Vec<f64>),
}

impl Default for StrikeGrid {
    fn default() -> Self {
        StrikeGrid::LogUniform { step: 1e-3 }
    }
}

impl StrikeGrid {
    /// Concrete, increasing strikes for a forward and a lattice.
    pub fn resolve(&self, forward: f64, lattice: &[f64]) -> Result<Vec<f64>> {
        let (lo, hi) = lattice
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let strikes = match self {
            StrikeGrid::LogUniform { step } => {
                if !(*step > 0.0) || !(lo > 0.0) {
                    return Err(VolspecError::Domain(format!("log-uniform strikes need step > 0, got {step}")));
                }
                let first = ((lo / forward).ln() / step).floor() as i64;
                let last = ((hi / forward).ln() / step).ceil() as i64;
                (first..=last).map(|i| forward * (i as f64 * step).exp()).collect()
            }
            StrikeGrid::Lattice { lower, upper } => {
                let mut ks: Vec<f64> = lattice
                    .iter()
                    .copied()
                    .filter(|&k| k >= lower * forward && k <= upper * forward)
                    .collect();
                ks.sort_by(f64::total_cmp);
                ks.dedup();
                ks
            }
            StrikeGrid::Explicit(ks) => ks.clone(),
        };
        if strikes.is_empty() {
            return Err(VolspecError::Domain("empty strike grid".into()));
        }
        if strikes.iter().any(|&k| !(k > 0.0)) || strikes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(VolspecError::Domain("strikes must be positive and increasing".into()));
        }
        Ok(strikes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VixSpec {
    /// Option expiry in years.
    pub tenor: f64,
    pub strikes: StrikeGrid,
}

impl Default for VixSpec {
    fn default() -> Self {
        Self {
            tenor: 1.0 / 12.0,
            strikes: StrikeGrid::default(),
        }
    }
}

/// Terminal distribution sorted by level, for fast strip valuation.
#[derive(Debug, Clone)]
pub struct TerminalDistribution {
    levels: Vec<f64>,
    probs: Vec<f64>,
    /// `sum_{j < i} p_j` and `sum_{j < i} p_j F_j`.
    cum_p: Vec<f64>,
    cum_pf: Vec<f64>,
}

impl TerminalDistribution {
    pub fn new(levels: &[f64], probs: &[f64]) -> Self {
        let mut pairs: Vec<(f64, f64)> = levels.iter().copied().zip(probs.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (levels, probs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mut cum_p = vec![0.0; levels.len() + 1];
        let mut cum_pf = vec![0.0; levels.len() + 1];
        for i in 0..levels.len() {
            cum_p[i + 1] = cum_p[i] + probs[i];
            cum_pf[i + 1] = cum_pf[i] + probs[i] * levels[i];
        }
        Self { levels, probs, cum_p, cum_pf }
    }

    pub fn mass(&self) -> f64 {
        self.cum_p[self.levels.len()]
    }

    pub fn mean(&self) -> f64 {
        self.cum_pf[self.levels.len()]
    }

    pub fn support(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.levels.iter().copied().zip(self.probs.iter().copied())
    }

    /// Undiscounted `E[(K - F)^+]`.
    pub fn put(&self, strike: f64) -> f64 {
        let i = self.levels.partition_point(|&f| f < strike);
        (strike * self.cum_p[i] - self.cum_pf[i]).max(0.0)
    }

    /// Undiscounted `E[(F - K)^+]`.
    pub fn call(&self, strike: f64) -> f64 {
        let i = self.levels.partition_point(|&f| f <= strike);
        let n = self.levels.len();
        ((self.cum_pf[n] - self.cum_pf[i]) - strike * (self.cum_p[n] - self.cum_p[i])).max(0.0)
    }
}

/// One strip valuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VixValue {
    /// `sigma_VIX^2`.
    pub variance: f64,
    pub vol_terms: f64,
    pub k0: f64,
    pub strikes: usize,
}

/// `(2/T) sum_i dK_i / K_i^2 Q(K_i) - (1/T) (F/K_0 - 1)^2` with undiscounted
/// out-of-the-money quotes `Q`: puts below `K_0`, calls above, their average
/// at `K_0`, the largest strike not above `F`. `dK_i` is half the distance
/// between neighbours, one-sided at the ends.
pub fn vix_portfolio(strikes: &[f64], dist: &TerminalDistribution, forward: f64, horizon: f64) -> Result<VixValue> {
    if strikes.is_empty() {
        return Err(VolspecError::Domain("empty strike grid".into()));
    }
    if !(horizon > 0.0 && forward > 0.0) {
        return Err(VolspecError::Domain(format!(
            "strip needs horizon > 0 and forward > 0, got {horizon}, {forward}"
        )));
    }
    let n = strikes.len();
    let k0_index = strikes.partition_point(|&k| k <= forward).saturating_sub(1);
    let k0 = strikes[k0_index];
    let mut sum = 0.0;
    for (i, &k) in strikes.iter().enumerate() {
        let dk = match (i, n) {
            (_, 1) => 0.0,
            (0, _) => strikes[1] - strikes[0],
            (i, n) if i == n - 1 => strikes[i] - strikes[i - 1],
            (i, _) => 0.5 * (strikes[i + 1] - strikes[i - 1]),
        };
        let q = match i.cmp(&k0_index) {
            std::cmp::Ordering::Less => dist.put(k),
            std::cmp::Ordering::Greater => dist.call(k),
            std::cmp::Ordering::Equal => 0.5 * (dist.put(k) + dist.call(k)),
        };
        sum += dk / (k * k) * q;
    }
    let variance = 2.0 / horizon * sum - (forward / k0 - 1.0).powi(2) / horizon;
    Ok(VixValue {
        variance,
        vol_terms: vol_terms(variance),
        k0,
        strikes: n,
    })
}

/// Strip value over calendar `[t, maturity]` from one state, with the
/// state's level as the forward.
pub fn portfolio_from(model: &Model, state: usize, t: f64, maturity: f64, strikes: &StrikeGrid) -> Result<VixValue> {
    let (row, _) = model.kernel_row(state, t, maturity)?;
    let forward = model.levels()[state];
    let ks = strikes.resolve(forward, model.grid().levels())?;
    let dist = TerminalDistribution::new(model.levels(), &row);
    vix_portfolio(&ks, &dist, forward, maturity - t)
}

pub fn portfolio(model: &Model, maturity: f64, strikes: &StrikeGrid) -> Result<VixValue> {
    portfolio_from(model, model.start_state(), 0.0, maturity, strikes)
}

/// Histogram of the index level `100 sigma_VIX` at horizon `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VixPdf {
    pub horizon: f64,
    pub bucket_width: f64,
    /// Left edge of each bucket in index points.
    pub edges: Vec<f64>,
    pub weights: Vec<f64>,
    pub diagnostics: KernelDiagnostics,
}

impl VixPdf {
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.edges
            .iter()
            .zip(&self.weights)
            .map(|(e, w)| (e + 0.5 * self.bucket_width) * w)
            .sum()
    }
}

/// Each state reachable at `t` carries its kernel probability and the index
/// computed from that state over `[t, t + tenor]`; the values are binned in
/// `bucket_width` intervals.
pub fn vix_pdf(model: &Model, t: f64, spec: &VixSpec, bucket_width: f64) -> Result<VixPdf> {
    if !(t > 0.0 && bucket_width > 0.0 && spec.tenor > 0.0) {
        return Err(VolspecError::Domain(format!(
            "index distribution needs t > 0, tenor > 0, width > 0; got {t}, {}, {bucket_width}",
            spec.tenor
        )));
    }
    let (row, diag) = model.kernel_row(model.start_state(), 0.0, t)?;
    let month = model.kernel(t, t + spec.tenor)?;
    let levels = model.levels();
    let dim = model.dim();
    let mut values = Vec::new();
    for s in 0..dim {
        if row[s] <= 0.0 {
            continue;
        }
        let forward = levels[s];
        let ks = spec.strikes.resolve(forward, model.grid().levels())?;
        let cond: Vec<f64> = (0..dim).map(|y| month.matrix[(s, y)]).collect();
        let v = vix_portfolio(&ks, &TerminalDistribution::new(levels, &cond), forward, spec.tenor)?;
        values.push((v.vol_terms, row[s]));
    }
    let top = values.iter().map(|v| v.0).fold(0.0, f64::max);
    let n_bins = (top / bucket_width).floor() as usize + 1;
    let mut weights = vec![0.0; n_bins];
    for (v, p) in values {
        weights[((v / bucket_width).floor() as usize).min(n_bins - 1)] += p;
    }
    Ok(VixPdf {
        horizon: t,
        bucket_width,
        edges: (0..n_bins).map(|i| i as f64 * bucket_width).collect(),
        weights,
        diagnostics: diag.merge(month.diagnostics),
    })
}
