//! European payoffs on the terminal state, smiles and Greeks profiles.

use serde::{Deserialize, Serialize};

use super::black_scholes::{implied_vol, BsInputs, OptionKind};
use crate::error::{Result, VolspecError};
use crate::model::{DiscountCurve, Model};
use crate::spectral::KernelDiagnostics;

/// Row mass must be this close to one before a row is priced against.
pub const ROW_MASS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VanillaSpec {
    pub kind: OptionKind,
    pub strike: f64,
    pub maturity: f64,
}

impl VanillaSpec {
    pub fn call(strike: f64, maturity: f64) -> Self {
        Self { kind: OptionKind::Call, strike, maturity }
    }

    pub fn put(strike: f64, maturity: f64) -> Self {
        Self { kind: OptionKind::Put, strike, maturity }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike > 0.0 && self.maturity > 0.0) {
            return Err(VolspecError::Domain(format!(
                "vanilla needs strike > 0 and maturity > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn payoff(&self, spot: f64) -> f64 {
        match self.kind {
            OptionKind::Call => (spot - self.strike).max(0.0),
            OptionKind::Put => (self.strike - spot).max(0.0),
        }
    }
}

/// A price with the health of the kernel it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Priced {
    pub price: f64,
    pub mass: f64,
    pub residue: f64,
}

/// `e^{-r(T - t)} sum_y p(y) h(y)`.
pub fn price_european(row: &[f64], payoff: &[f64], t: f64, maturity: f64, curve: &DiscountCurve) -> Result<f64> {
    if row.len() != payoff.len() {
        return Err(VolspecError::Domain(format!(
            "kernel row has {} states, payoff {}",
            row.len(),
            payoff.len()
        )));
    }
    let mass: f64 = row.iter().sum();
    if (mass - 1.0).abs() > ROW_MASS_TOL {
        return Err(VolspecError::Numerical(format!("kernel row mass {mass} is not 1")));
    }
    let expectation: f64 = row.iter().zip(payoff).map(|(p, h)| p * h).sum();
    Ok(curve.discount(t, maturity) * expectation)
}

/// Spot level of every product state at calendar `t`.
pub fn terminal_spots(model: &Model, t: f64) -> Vec<f64> {
    let curve = model.discount();
    model.levels().iter().map(|&f| curve.spot_from_forward(f, t)).collect()
}

/// Vanilla from an arbitrary product state at time zero.
pub fn price_vanilla_from(model: &Model, state: usize, spec: &VanillaSpec) -> Result<Priced> {
    spec.validate()?;
    let (row, diag) = model.kernel_row(state, 0.0, spec.maturity)?;
    let payoff: Vec<f64> = terminal_spots(model, spec.maturity)
        .iter()
        .map(|&s| spec.payoff(s))
        .collect();
    let price = price_european(&row, &payoff, 0.0, spec.maturity, model.discount())?;
    Ok(Priced {
        price,
        mass: row.iter().sum(),
        residue: diag.imaginary_residue,
    })
}

pub fn price_vanilla(model: &Model, spec: &VanillaSpec) -> Result<Priced> {
    price_vanilla_from(model, model.start_state(), spec)
}

/// Black-Scholes inputs matching a vanilla on the model's curve.
pub fn bs_inputs(model: &Model, spec: &VanillaSpec) -> BsInputs {
    let curve = model.discount();
    BsInputs {
        kind: spec.kind,
        spot: model.grid().spot(),
        strike: spec.strike,
        maturity: spec.maturity,
        rate: curve.r,
        dividend: curve.q,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmilePoint {
    pub strike: f64,
    pub maturity: f64,
    pub price: f64,
    /// `None` when the price sits outside the Black-Scholes bounds.
    pub implied_vol: Option<f64>,
}

/// Call prices and implied vols across strikes, sharing one kernel row.
pub fn vanilla_smile(model: &Model, maturity: f64, strikes: &[f64]) -> Result<(Vec<SmilePoint>, KernelDiagnostics)> {
    let (row, diag) = model.kernel_row(model.start_state(), 0.0, maturity)?;
    let spots = terminal_spots(model, maturity);
    let points = strikes
        .iter()
        .map(|&k| {
            let spec = VanillaSpec::call(k, maturity);
            spec.validate()?;
            let payoff: Vec<f64> = spots.iter().map(|&s| spec.payoff(s)).collect();
            let price = price_european(&row, &payoff, 0.0, maturity, model.discount())?;
            let implied_vol = implied_vol(price, &bs_inputs(model, &spec)).ok();
            Ok(SmilePoint { strike: k, maturity, price, implied_vol })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((points, diag))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreekPoint {
    pub node: usize,
    pub level: f64,
    pub price: f64,
    pub delta: f64,
    pub gamma: f64,
    /// Needs at least two regimes with distinct `sigma`.
    pub vega: Option<f64>,
}

/// Delta, gamma and regime vega of a European payoff for every interior
/// start node.
///
/// With `C(x, g)` the price from node `x` in regime `g` and `b` the start
/// regime, delta and gamma are symmetric differences of `C(., b)` on the
/// (nonuniform) grid; vega is `(C(x,0) - C(x,1)) / (sigma_0 - sigma_1)`.
pub fn greeks_profile(model: &Model, spec: &VanillaSpec) -> Result<(Vec<GreekPoint>, KernelDiagnostics)> {
    spec.validate()?;
    let payoff: Vec<f64> = terminal_spots(model, spec.maturity)
        .iter()
        .map(|&s| spec.payoff(s))
        .collect();
    greeks_for_payoff(model, &payoff, spec.maturity)
}

pub fn greeks_for_payoff(model: &Model, payoff: &[f64], maturity: f64) -> Result<(Vec<GreekPoint>, KernelDiagnostics)> {
    let grid = model.grid();
    let n = grid.len();
    if n < 5 {
        return Err(VolspecError::Domain(format!(
            "greeks need at least 3 interior nodes, grid has {n} nodes"
        )));
    }
    let kernel = model.kernel(0.0, maturity)?;
    let df = model.discount().discount(0.0, maturity);
    let dim = model.dim();
    let values: Vec<f64> = (0..dim)
        .map(|s| df * (0..dim).map(|y| kernel.matrix[(s, y)] * payoff[y]).sum::<f64>())
        .collect();

    let regime = model.config().start_regime;
    let c = |x: usize, g: usize| values[model.state(x, g)];
    let f = |x: usize| grid.level(x);
    let params = model.regime_params();
    let vega_scale = (params.len() >= 2 && params[0].sigma != params[1].sigma)
        .then(|| params[0].sigma - params[1].sigma);

    let points = (1..n - 1)
        .map(|x| {
            let delta = (c(x + 1, regime) - c(x - 1, regime)) / (f(x + 1) - f(x - 1));
            let up = (c(x + 1, regime) - c(x, regime)) / (f(x + 1) - f(x));
            let down = (c(x, regime) - c(x - 1, regime)) / (f(x) - f(x - 1));
            let gamma = 2.0 * (up - down) / (f(x + 1) - f(x - 1));
            GreekPoint {
                node: x,
                level: f(x),
                price: c(x, regime),
                delta,
                gamma,
                vega: vega_scale.map(|s| (c(x, 0) - c(x, 1)) / s),
            }
        })
        .collect();
    Ok((points, kernel.diagnostics))
}
