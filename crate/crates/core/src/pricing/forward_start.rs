//! Forward-starting calls `(S_T - a S_T')^+` and the forward smile.

use serde::{Deserialize, Serialize};

use super::black_scholes::{implied_vol, BsInputs, OptionKind};
use super::european::{price_european, terminal_spots, Priced};
use crate::error::{Result, VolspecError};
use crate::model::Model;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardStartSpec {
    /// Strike-setting date.
    pub t_prime: f64,
    pub maturity: f64,
    /// Moneyness `a` applied to the spot at `t_prime`.
    pub forward_strike: f64,
}

impl ForwardStartSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_prime > 0.0 && self.t_prime < self.maturity && self.forward_strike >= 0.0) {
            return Err(VolspecError::Domain(format!(
                "forward start needs 0 < t' < T and a >= 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Value at `t'` of the forward-start payoff for every product state.
fn payoff_at_reset(model: &Model, spec: &ForwardStartSpec) -> Result<Vec<f64>> {
    let late = model.kernel(spec.t_prime, spec.maturity)?;
    let s_reset = terminal_spots(model, spec.t_prime);
    let s_final = terminal_spots(model, spec.maturity);
    let df = model.discount().discount(spec.t_prime, spec.maturity);
    let dim = model.dim();
    Ok((0..dim)
        .map(|x| {
            let k = spec.forward_strike * s_reset[x];
            df * (0..dim)
                .map(|y| late.matrix[(x, y)] * (s_final[y] - k).max(0.0))
                .sum::<f64>()
        })
        .collect())
}

/// One kernel over `[t', T]` turns the payoff into a function of the reset
/// state, which is then priced as a European maturing at `t'`.
pub fn price_forward_start(model: &Model, spec: &ForwardStartSpec) -> Result<Priced> {
    spec.validate()?;
    let reset = payoff_at_reset(model, spec)?;
    let (row, diag) = model.kernel_row(model.start_state(), 0.0, spec.t_prime)?;
    let price = price_european(&row, &reset, 0.0, spec.t_prime, model.discount())?;
    Ok(Priced {
        price,
        mass: row.iter().sum(),
        residue: diag.imaginary_residue,
    })
}

/// `sigma'` solving `V = S_0 BS(1, T - t', a, r', sigma')`.
pub fn forward_implied_vol(price: f64, spot: f64, spec: &ForwardStartSpec, rate: f64) -> Result<f64> {
    spec.validate()?;
    if !(spot > 0.0) {
        return Err(VolspecError::Domain(format!("spot {spot} must be > 0")));
    }
    let unit = BsInputs {
        kind: OptionKind::Call,
        spot: 1.0,
        strike: spec.forward_strike,
        maturity: spec.maturity - spec.t_prime,
        rate,
        dividend: 0.0,
    };
    implied_vol(price / spot, &unit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForwardSmilePoint {
    pub forward_strike: f64,
    pub price: f64,
    pub implied_vol: Option<f64>,
}

/// Prices and implied forward vols across moneyness, sharing both kernels.
pub fn forward_smile(model: &Model, t_prime: f64, maturity: f64, moneyness: &[f64]) -> Result<Vec<ForwardSmilePoint>> {
    let (row, _) = model.kernel_row(model.start_state(), 0.0, t_prime)?;
    let late = model.kernel(t_prime, maturity)?;
    let s_reset = terminal_spots(model, t_prime);
    let s_final = terminal_spots(model, maturity);
    let curve = model.discount();
    let df = curve.discount(t_prime, maturity);
    let dim = model.dim();
    moneyness
        .iter()
        .map(|&a| {
            let spec = ForwardStartSpec { t_prime, maturity, forward_strike: a };
            spec.validate()?;
            let reset: Vec<f64> = (0..dim)
                .map(|x| {
                    df * (0..dim)
                        .map(|y| late.matrix[(x, y)] * (s_final[y] - a * s_reset[x]).max(0.0))
                        .sum::<f64>()
                })
                .collect();
            let price = price_european(&row, &reset, 0.0, t_prime, curve)?;
            let implied_vol = forward_implied_vol(price, model.grid().spot(), &spec, 0.0).ok();
            Ok(ForwardSmilePoint { forward_strike: a, price, implied_vol })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        let ok = ForwardStartSpec { t_prime: 0.25, maturity: 1.0, forward_strike: 1.0 };
        assert!(ok.validate().is_ok());
        assert!(ForwardStartSpec { t_prime: 1.0, ..ok }.validate().is_err());
        assert!(ForwardStartSpec { t_prime: 0.0, ..ok }.validate().is_err());
        assert!(ForwardStartSpec { forward_strike: -0.1, ..ok }.validate().is_err());
    }

    #[test]
    fn implied_forward_vol_round_trips() {
        let spec = ForwardStartSpec { t_prime: 0.25, maturity: 1.25, forward_strike: 1.1 };
        let unit = BsInputs {
            kind: OptionKind::Call,
            spot: 1.0,
            strike: 1.1,
            maturity: 1.0,
            rate: 0.0,
            dividend: 0.0,
        };
        let price = 100.0 * unit.price(0.18);
        let v = forward_implied_vol(price, 100.0, &spec, 0.0).unwrap();
        assert!((v - 0.18).abs() < 1e-8);
    }
}
