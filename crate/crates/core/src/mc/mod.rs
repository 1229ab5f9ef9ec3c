//! Daily-sampled Monte Carlo of the chain, used to cross-check the lift.
//!
//! Paths are drawn exactly from the one-day transition kernel, so the only
//! error against the model is statistical plus the daily discretization of
//! realized variance.

pub mod compare;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VolspecError};
use crate::model::Model;
use crate::pricing::{vol_terms, VariancePayoff};
use crate::spectral::KernelDiagnostics;

pub use compare::{compare, ComparisonRow, ComparisonTable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub n_paths: usize,
    pub steps_per_year: usize,
    /// Calendar years simulated.
    pub horizon: f64,
    pub seed: u64,
    /// Product state at time zero; the model's start state when `None`.
    pub start: Option<usize>,
}

impl PathConfig {
    pub fn new(n_paths: usize, horizon: f64, seed: u64) -> Self {
        Self {
            n_paths,
            steps_per_year: 252,
            horizon,
            seed,
            start: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 1 || self.steps_per_year < 1 || !(self.horizon > 0.0) {
            return Err(VolspecError::Config(format!(
                "need n_paths >= 1, steps_per_year >= 1, horizon > 0; got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.horizon * self.steps_per_year as f64).round().max(1.0) as usize
    }

    fn step_index(&self, t: f64) -> usize {
        (t * self.steps_per_year as f64).round() as usize
    }
}

/// Resolution of the daily-kernel cache, in financial years.
const DT_QUANTUM: f64 = 1e-12;

/// Row-wise cumulative distributions of a one-step kernel.
#[derive(Debug, Clone)]
struct StepSampler {
    cdf: Vec<Vec<f64>>,
}

impl StepSampler {
    fn from_kernel(matrix: faer::MatRef<'_, f64>) -> Self {
        let n = matrix.nrows();
        let cdf = (0..n)
            .map(|i| {
                let mut acc = 0.0;
                let mut row: Vec<f64> = (0..n)
                    .map(|j| {
                        acc += matrix[(i, j)];
                        acc
                    })
                    .collect();
                // truncation leaves the row a hair off 1; renormalize
                let total = acc;
                row.iter_mut().for_each(|c| *c /= total);
                row
            })
            .collect();
        Self { cdf }
    }

    fn sample(&self, from: usize, u: f64) -> usize {
        let row = &self.cdf[from];
        row.partition_point(|&c| c <= u).min(row.len() - 1)
    }
}

/// One-day kernels, cached by the financial-time increment so an identity
/// clock builds a single matrix.
#[derive(Debug)]
pub struct DailyKernels {
    samplers: Vec<StepSampler>,
    /// Sampler used on each step.
    schedule: Vec<usize>,
    diagnostics: KernelDiagnostics,
}

impl DailyKernels {
    pub fn build(model: &Model, config: &PathConfig) -> Result<Self> {
        let spy = config.steps_per_year as f64;
        let mut by_dt: HashMap<i64, usize> = HashMap::new();
        let mut samplers = Vec::new();
        let mut schedule = Vec::with_capacity(config.n_steps());
        let mut diagnostics = KernelDiagnostics::default();
        for i in 0..config.n_steps() {
            let raw = model.financial_dt(i as f64 / spy, (i + 1) as f64 / spy)?;
            // grid arithmetic leaves last-bit noise in equal increments
            let key = (raw / DT_QUANTUM).round() as i64;
            let dt = key as f64 * DT_QUANTUM;
            let idx = match by_dt.get(&key) {
                Some(&idx) => idx,
                None => {
                    let kernel = model.decomposition().transition_kernel(dt)?;
                    diagnostics = diagnostics.merge(kernel.diagnostics);
                    samplers.push(StepSampler::from_kernel(kernel.matrix.as_ref()));
                    by_dt.insert(key, samplers.len() - 1);
                    samplers.len() - 1
                }
            };
            schedule.push(idx);
        }
        Ok(Self {
            samplers,
            schedule,
            diagnostics,
        })
    }

    /// Number of distinct matrices built.
    pub fn distinct(&self) -> usize {
        self.samplers.len()
    }

    pub fn diagnostics(&self) -> KernelDiagnostics {
        self.diagnostics
    }
}

/// Per-path annualized realized variance at one maturity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaSample {
    pub maturity: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub samples: Vec<SigmaSample>,
    /// Product state of each path at the horizon.
    pub terminal: Vec<usize>,
    pub kernel_diagnostics: KernelDiagnostics,
}

/// Simulates `n_paths` daily paths and records
/// `(1/T) sum_i ((F_i - F_{i-1}) / F_{i-1})^2` at every observation date.
///
/// Path `p` draws from ChaCha8 stream `p` of the seed, and results are
/// gathered in path order, so output is independent of the thread count.
pub fn simulate(model: &Model, config: &PathConfig, observe: &[f64]) -> Result<Simulation> {
    config.validate()?;
    let n_steps = config.n_steps();
    let marks: Vec<usize> = observe.iter().map(|&t| config.step_index(t)).collect();
    if let Some((t, _)) = observe.iter().zip(&marks).find(|(_, &m)| m == 0 || m > n_steps) {
        return Err(VolspecError::Config(format!(
            "observation date {t} is outside (0, {}]",
            config.horizon
        )));
    }
    let start = config.start.unwrap_or(model.start_state());
    if start >= model.dim() {
        return Err(VolspecError::Config(format!("start state {start} out of range")));
    }
    let kernels = DailyKernels::build(model, config)?;
    let levels = model.levels();

    let per_path: Vec<(Vec<f64>, usize)> = (0..config.n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(p as u64);
            let mut state = start;
            let mut sum = 0.0;
            let mut out = vec![0.0; marks.len()];
            for step in 0..n_steps {
                let u: f64 = rng.gen();
                let next = kernels.samplers[kernels.schedule[step]].sample(state, u);
                let ret = (levels[next] - levels[state]) / levels[state];
                sum += ret * ret;
                state = next;
                for (o, &m) in out.iter_mut().zip(&marks) {
                    if m == step + 1 {
                        *o = sum;
                    }
                }
            }
            (out, state)
        })
        .collect();

    let samples = observe
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let years = marks[k] as f64 / config.steps_per_year as f64;
            SigmaSample {
                maturity: t,
                values: per_path.iter().map(|(v, _)| v[k] / years).collect(),
            }
        })
        .collect();
    Ok(Simulation {
        samples,
        terminal: per_path.iter().map(|(_, s)| *s).collect(),
        kernel_diagnostics: kernels.diagnostics(),
    })
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl McEstimate {
    /// `100 sqrt(mean)` with a delta-method standard error.
    pub fn vol_terms(&self) -> (f64, f64) {
        let v = vol_terms(self.mean);
        let se = if self.mean > 0.0 {
            50.0 * self.std_error / self.mean.sqrt()
        } else {
            0.0
        };
        (v, se)
    }
}

pub fn mc_price(sample: &SigmaSample, payoff: &VariancePayoff) -> Result<McEstimate> {
    payoff.validate()?;
    let n = sample.values.len();
    if n == 0 {
        return Err(VolspecError::Domain("empty Monte Carlo sample".into()));
    }
    let xs: Vec<f64> = sample.values.iter().map(|&s| payoff.evaluate(s)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_error: (var / n as f64).sqrt(),
        n,
    })
}
