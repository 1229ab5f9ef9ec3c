//! Realized-variance lift of the spot chain.
//!
//! A counter `m_t` on the ring `0..2C` steps up at rate `Q(x) / alpha`, so
//! `I_t = alpha m_t` has the same instantaneous drift as accrued variance.
//! The lifted generator is partial-circulant in the counter and splits into
//! the blocks of [`blocks`]; [`joint`] recombines them.

pub mod blocks;
pub mod joint;
pub mod variance;

pub use blocks::{block_matrix, build_blocks, BlockFamily};
pub use joint::{joint_distribution, JointDiagnostics, JointDistribution, VariancePdf};
pub use variance::{alpha_schedule, instantaneous_variance, AlphaRule, LiftParams, VarianceGrid};

use crate::error::{Result, VolspecError};
use crate::model::Model;

/// Builds the block family for a model over calendar `[t, maturity]`.
pub fn model_blocks(model: &Model, t: f64, maturity: f64, params: &LiftParams) -> Result<BlockFamily> {
    params.validate()?;
    let spacing = params.spacing(t, maturity, model.time_change());
    model_blocks_with(model, VarianceGrid::new(params.c_max, spacing)?, params.conjugate_economy)
}

fn model_blocks_with(model: &Model, grid: VarianceGrid, economy: bool) -> Result<BlockFamily> {
    let q = instantaneous_variance(model.generator(), model.levels())?;
    BlockFamily::build(model.generator(), &q, grid, economy)
}

/// Joint spot/variance distribution of a model from its start state, with
/// the leakage guard applied.
pub fn model_joint(model: &Model, t: f64, maturity: f64, params: &LiftParams) -> Result<JointDistribution> {
    model_joint_from(model, model.start_state(), t, maturity, params)
}

pub fn model_joint_from(
    model: &Model,
    start: usize,
    t: f64,
    maturity: f64,
    params: &LiftParams,
) -> Result<JointDistribution> {
    params.validate()?;
    let spacing = params.spacing(t, maturity, model.time_change());
    let mut grid = VarianceGrid::new(params.c_max, spacing)?;
    let retries = if params.widen_on_leak { 2 } else { 0 };
    let mut attempt = 0;
    loop {
        let family = model_blocks_with(model, grid, params.conjugate_economy)?;
        let jd = joint_distribution(&family, start, t, maturity, model.time_change())?;
        match jd.check_leakage(params) {
            Ok(_) => return Ok(jd),
            Err(VolspecError::Leakage { mass, .. }) if attempt < retries => {
                let wider = grid.c_max + grid.c_max.div_ceil(4);
                log::warn!(
                    "leakage {mass:.2e} with C = {}; widening to C = {wider} at the same spacing",
                    grid.c_max
                );
                grid = VarianceGrid::new(wider, grid.spacing)?;
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}
