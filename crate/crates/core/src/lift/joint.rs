//! Joint spot/variance kernel by inverse DFT across blocks.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::blocks::BlockFamily;
use super::variance::LiftParams;
use crate::error::{Result, VolspecError};
use crate::model::StateSpace;
use crate::spectral::decomposition::RESIDUE_ERROR;
use crate::spectral::KernelDiagnostics;
use crate::{TimeChange, C64};

/// Mass deficit beyond which the joint distribution is rejected.
pub const MASS_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct JointDiagnostics {
    pub mass: f64,
    /// Smallest probability before clamping.
    pub min_entry: f64,
    pub imaginary_residue: f64,
}

impl JointDiagnostics {
    /// Viewed as a single kernel row.
    pub fn as_kernel(&self) -> KernelDiagnostics {
        KernelDiagnostics {
            max_row_sum_error: (self.mass - 1.0).abs(),
            min_entry: self.min_entry,
            imaginary_residue: self.imaginary_residue,
        }
    }
}

/// Probabilities over (state, variance bucket) at `maturity`, starting from
/// one state with an empty variance counter at `t`.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    probs: Vec<f64>,
    n_states: usize,
    n_buckets: usize,
    alpha: f64,
    start: usize,
    t: f64,
    maturity: f64,
    diagnostics: JointDiagnostics,
}

/// Distribution of annualized realized variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariancePdf {
    pub labels: Vec<f64>,
    pub weights: Vec<f64>,
}

impl VariancePdf {
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn expectation(&self, h: impl Fn(f64) -> f64) -> f64 {
        self.labels.iter().zip(&self.weights).map(|(&s, &w)| w * h(s)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|s| s)
    }
}

/// `p(y, d) = (1/n) sum_k exp(i p_k d) exp(tau L_k)(start, y)` with
/// `tau = f(T) - f(t)`. Block rows are computed in parallel and summed in
/// block order, so the result does not depend on the thread count.
pub fn joint_distribution(
    family: &BlockFamily,
    start: usize,
    t: f64,
    maturity: f64,
    tc: &TimeChange,
) -> Result<JointDistribution> {
    if !(maturity > t && t >= 0.0) {
        return Err(VolspecError::Domain(format!(
            "joint distribution needs 0 <= t < T, got t={t}, T={maturity}"
        )));
    }
    let n_states = family.instantaneous_variance().len();
    if start >= n_states {
        return Err(VolspecError::Domain(format!("start state {start} out of range")));
    }
    let tau = tc.eval(maturity) - tc.eval(t);
    let n = family.n_buckets();
    let c = family.c_max();

    // Economy: blocks 0..=C, the conjugate partners enter as 2 Re(.).
    let block_count = if family.is_economy() { c + 1 } else { n };
    let rows: Vec<Vec<C64>> = (0..block_count)
        .into_par_iter()
        .map(|k| family.exp_row(k, start, tau))
        .collect();

    let phases: Vec<C64> = (0..n)
        .map(|m| {
            let a = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
            C64::new(a.cos(), a.sin())
        })
        .collect();
    let scale = 1.0 / n as f64;
    let mut probs = vec![0.0; n_states * n];
    let mut diagnostics = JointDiagnostics::default();
    let mut mass = 0.0;
    for y in 0..n_states {
        for d in 0..n {
            let mut acc = rows[0][y];
            for (k, row) in rows.iter().enumerate().skip(1) {
                let term = phases[(k * d) % n] * row[y];
                if family.is_economy() {
                    acc += C64::new(2.0 * term.re, 0.0);
                } else {
                    acc += term;
                }
            }
            let z = acc * scale;
            diagnostics.imaginary_residue = diagnostics.imaginary_residue.max(z.im.abs());
            diagnostics.min_entry = diagnostics.min_entry.min(z.re);
            mass += z.re;
            probs[y * n + d] = z.re.max(0.0);
        }
    }
    diagnostics.mass = mass;
    if diagnostics.imaginary_residue > RESIDUE_ERROR {
        return Err(VolspecError::Numerical(format!(
            "joint kernel imaginary residue {:.3e}",
            diagnostics.imaginary_residue
        )));
    }
    if (mass - 1.0).abs() > MASS_TOLERANCE {
        return Err(VolspecError::Leakage {
            mass: (mass - 1.0).abs(),
            buckets: n,
            limit: MASS_TOLERANCE,
        });
    }
    Ok(JointDistribution {
        probs,
        n_states,
        n_buckets: n,
        alpha: family.alpha(),
        start,
        t,
        maturity,
        diagnostics,
    })
}

impl JointDistribution {
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_buckets(&self) -> usize {
        self.n_buckets
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t, self.maturity)
    }

    pub fn diagnostics(&self) -> JointDiagnostics {
        self.diagnostics
    }

    pub fn prob(&self, state: usize, bucket: usize) -> f64 {
        self.probs[state * self.n_buckets + bucket]
    }

    pub fn mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Sum over variance buckets: the terminal-state distribution.
    pub fn spot_marginal(&self) -> Vec<f64> {
        self.probs
            .chunks(self.n_buckets)
            .map(|row| row.iter().sum())
            .collect()
    }

    /// Sum over states: the distribution of the bucket index.
    pub fn bucket_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_buckets];
        for row in self.probs.chunks(self.n_buckets) {
            for (o, p) in out.iter_mut().zip(row) {
                *o += p;
            }
        }
        out
    }

    /// Annualized realized variance `alpha d / (T - t)` with its weights.
    pub fn variance_pdf(&self) -> VariancePdf {
        let window = self.maturity - self.t;
        VariancePdf {
            labels: (0..self.n_buckets)
                .map(|d| self.alpha * d as f64 / window)
                .collect(),
            weights: self.bucket_marginal(),
        }
    }

    /// Mass in the highest `tail` buckets.
    pub fn leakage_probability(&self, tail: usize) -> f64 {
        let marginal = self.bucket_marginal();
        marginal[self.n_buckets.saturating_sub(tail)..].iter().sum()
    }

    /// Errors above `leakage_error`, logs a warning above `leakage_warn`.
    pub fn check_leakage(&self, params: &LiftParams) -> Result<f64> {
        let leak = self.leakage_probability(params.leakage_buckets);
        if leak > params.leakage_error {
            return Err(VolspecError::Leakage {
                mass: leak,
                buckets: params.leakage_buckets,
                limit: params.leakage_error,
            });
        }
        if leak > params.leakage_warn {
            log::warn!(
                "variance lattice leakage {leak:.2e} in the top {} buckets",
                params.leakage_buckets
            );
        }
        Ok(leak)
    }

    /// CSV with columns `spot_level, regime, realized_variance, probability`;
    /// zero cells are skipped.
    pub fn write_csv<W: Write>(&self, levels: &[f64], space: StateSpace, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["spot_level", "regime", "realized_variance", "probability"])?;
        let window = self.maturity - self.t;
        for s in 0..self.n_states {
            let (_, regime) = space.split(s);
            for d in 0..self.n_buckets {
                let p = self.prob(s, d);
                if p == 0.0 {
                    continue;
                }
                w.write_record([
                    format!("{:.5e}", levels[s]),
                    regime.to_string(),
                    format!("{:.5e}", self.alpha * d as f64 / window),
                    format!("{p:.5e}"),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, levels: &[f64], space: StateSpace) -> serde_json::Value {
        let window = self.maturity - self.t;
        let cells: Vec<serde_json::Value> = (0..self.n_states)
            .flat_map(|s| {
                let (_, regime) = space.split(s);
                (0..self.n_buckets).filter_map(move |d| {
                    let p = self.prob(s, d);
                    (p != 0.0).then(|| {
                        serde_json::json!({
                            "spot_level": levels[s],
                            "regime": regime,
                            "realized_variance": self.alpha * d as f64 / window,
                            "probability": p,
                        })
                    })
                })
            })
            .collect();
        serde_json::json!({
            "t": self.t,
            "maturity": self.maturity,
            "alpha": self.alpha,
            "buckets": self.n_buckets,
            "diagnostics": self.diagnostics,
            "cells": cells,
        })
    }
}
