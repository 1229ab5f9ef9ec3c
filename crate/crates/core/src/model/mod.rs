//! Lattice domains and the regime-switching jump-diffusion generator.

pub mod cev;
pub mod config;
pub mod discount;
pub mod generator;
pub mod grid;
pub mod regime;
pub mod subordinate;
pub mod time_change;

pub use cev::build_cev_generator;
pub use config::{GridConfig, ModelConfig};
pub use discount::DiscountCurve;
pub use generator::{MarkovGenerator, StateSpace};
pub use grid::build_elliptical_grid;
pub use regime::{assemble_regime_generator, partition_of_unity, SwitchGenerator};
pub use subordinate::{subordinate, SubordinationReport};
pub use time_change::financial_time;

use crate::error::{Result, VolspecError};
use crate::spectral::{diagonalize_real, KernelDiagnostics, SpectralDecomposition, TransitionKernel};
use crate::{RegimeParams, StateGrid, TimeChange};

/// A fully assembled model: the product generator on spot x regime, its
/// eigendecomposition, the clock and the curve.
#[derive(Debug, Clone)]
pub struct Model {
    config: ModelConfig,
    grid: StateGrid,
    regime_generators: Vec<MarkovGenerator>,
    generator: MarkovGenerator,
    levels: Vec<f64>,
    time_change: TimeChange,
    discount: DiscountCurve,
    start_state: usize,
    decomposition: SpectralDecomposition,
    subordination: Vec<SubordinationReport>,
}

impl Model {
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let g = config.grid;
        let grid = grid::build_stretched_grid(g.n, g.spot, g.top, g.bottom, g.stretch)?;
        let reference = config.cev_reference();

        let mut regime_generators = Vec::with_capacity(config.regimes.len());
        let mut subordination = Vec::with_capacity(config.regimes.len());
        for (i, p) in config.regimes.iter().enumerate() {
            let diffusion = build_cev_generator(&grid, p, reference)?;
            let target: Vec<f64> = grid
                .levels()
                .iter()
                .enumerate()
                .map(|(x, &f)| {
                    if grid.is_interior(x) {
                        p.local_vol(f, reference).powi(2)
                    } else {
                        0.0
                    }
                })
                .collect();
            let (gen, report) = subordinate(&diffusion, &grid, p.nu_plus, p.nu_minus, &target)
                .map_err(|e| match e {
                    VolspecError::Numerical(m) => VolspecError::Numerical(format!("regime {i}: {m}")),
                    other => other,
                })?;
            regime_generators.push(gen);
            subordination.push(report);
        }

        let switches = config
            .switch_generators
            .iter()
            .map(|m| SwitchGenerator::new(m.clone()))
            .collect::<Result<Vec<_>>>()?;
        let anchors: Vec<f64> = config.regimes.iter().map(|r| r.level).collect();
        let generator = assemble_regime_generator(&regime_generators, &switches, &anchors, &grid)?;
        let space = generator.space();
        let levels = (0..space.dim()).map(|s| grid.level(space.split(s).0)).collect();

        let time_change = if config.time_change.is_empty() {
            TimeChange::identity()
        } else {
            TimeChange::new(config.time_change.clone())?
        };
        let discount = DiscountCurve::new(config.discount.r, config.discount.q)?;
        let start_state = space.index(grid.spot_index(), config.start_regime);
        let decomposition = diagonalize_real(generator.matrix())?;

        Ok(Self {
            config,
            grid,
            regime_generators,
            generator,
            levels,
            time_change,
            discount,
            start_state,
            decomposition,
            subordination,
        })
    }

    pub fn bundled(name: &str) -> Result<Self> {
        Self::new(ModelConfig::bundled(name)?)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn grid(&self) -> &StateGrid {
        &self.grid
    }

    pub fn regime_params(&self) -> &[RegimeParams] {
        &self.config.regimes
    }

    pub fn regime_generators(&self) -> &[MarkovGenerator] {
        &self.regime_generators
    }

    pub fn generator(&self) -> &MarkovGenerator {
        &self.generator
    }

    pub fn space(&self) -> StateSpace {
        self.generator.space()
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn n_regimes(&self) -> usize {
        self.space().n_regimes()
    }

    /// Forward level of every product state.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn time_change(&self) -> &TimeChange {
        &self.time_change
    }

    pub fn discount(&self) -> &DiscountCurve {
        &self.discount
    }

    /// Spot node in the configured start regime.
    pub fn start_state(&self) -> usize {
        self.start_state
    }

    pub fn state(&self, x: usize, regime: usize) -> usize {
        self.space().index(x, regime)
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn subordination_reports(&self) -> &[SubordinationReport] {
        &self.subordination
    }

    /// Financial-time length of `[t, maturity]`.
    pub fn financial_dt(&self, t: f64, maturity: f64) -> Result<f64> {
        if !(maturity >= t && t >= 0.0) {
            return Err(VolspecError::Domain(format!(
                "need 0 <= t <= T, got t={t}, T={maturity}"
            )));
        }
        Ok(self.time_change.eval(maturity) - self.time_change.eval(t))
    }

    /// Full transition matrix over calendar `[t, maturity]`.
    pub fn kernel(&self, t: f64, maturity: f64) -> Result<TransitionKernel> {
        self.decomposition.transition_kernel(self.financial_dt(t, maturity)?)
    }

    /// One row of the transition matrix over calendar `[t, maturity]`.
    pub fn kernel_row(&self, state: usize, t: f64, maturity: f64) -> Result<(Vec<f64>, KernelDiagnostics)> {
        self.decomposition.kernel_row(state, self.financial_dt(t, maturity)?)
    }

    /// Largest real part of the generator spectrum.
    pub fn spectral_abscissa(&self) -> f64 {
        self.decomposition
            .eigenvalues()
            .iter()
            .map(|l| l.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
