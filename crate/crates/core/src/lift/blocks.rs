//! Shifted block generators `L_k = L + diag((exp(-i p_k) - 1) Q / alpha)`.

use faer::Mat;
use rayon::prelude::*;

use super::variance::VarianceGrid;
use crate::error::{Result, VolspecError};
use crate::model::MarkovGenerator;
use crate::spectral::{diagonalize, SpectralDecomposition};
use crate::C64;

/// The `2C + 1` blocks of the lifted generator with their decompositions.
///
/// Block `2C + 1 - k` is the complex conjugate of block `k`, so in economy
/// mode only `k = 0..=C` are diagonalized.
#[derive(Debug, Clone)]
pub struct BlockFamily {
    grid: VarianceGrid,
    q: Vec<f64>,
    decompositions: Vec<SpectralDecomposition>,
    economy: bool,
}

/// `L_k` as a dense complex matrix.
pub fn block_matrix(gen: &MarkovGenerator, q: &[f64], grid: &VarianceGrid, k: usize) -> Mat<C64> {
    let p = grid.phase(k);
    let shift = C64::new(p.cos() - 1.0, -p.sin());
    let n = gen.dim();
    let m = gen.matrix();
    Mat::from_fn(n, n, |i, j| {
        let base = C64::new(m[(i, j)], 0.0);
        if i == j && k != 0 {
            base + shift * (q[i] / grid.spacing)
        } else {
            base
        }
    })
}

impl BlockFamily {
    /// Builds and diagonalizes the blocks in parallel; the result is ordered
    /// by block index regardless of scheduling.
    pub fn build(gen: &MarkovGenerator, q: &[f64], grid: VarianceGrid, economy: bool) -> Result<Self> {
        if q.len() != gen.dim() {
            return Err(VolspecError::Config(format!(
                "{} variance rates for a {}-state generator",
                q.len(),
                gen.dim()
            )));
        }
        let count = if economy { grid.c_max + 1 } else { grid.n_buckets() };
        let decompositions = (0..count)
            .into_par_iter()
            .map(|k| {
                diagonalize(block_matrix(gen, q, &grid, k).as_ref()).map_err(|e| VolspecError::Block {
                    block: k,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            q: q.to_vec(),
            decompositions,
            economy,
        })
    }

    pub fn grid(&self) -> VarianceGrid {
        self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.grid.spacing
    }

    pub fn c_max(&self) -> usize {
        self.grid.c_max
    }

    pub fn n_buckets(&self) -> usize {
        self.grid.n_buckets()
    }

    pub fn instantaneous_variance(&self) -> &[f64] {
        &self.q
    }

    pub fn is_economy(&self) -> bool {
        self.economy
    }

    /// Number of blocks actually diagonalized.
    pub fn diagonalized(&self) -> usize {
        self.decompositions.len()
    }

    pub fn decomposition(&self, k: usize) -> Option<&SpectralDecomposition> {
        self.decompositions.get(k)
    }

    /// Row `start` of `exp(tau L_k)` for any `k` in `0..2C+1`.
    pub fn exp_row(&self, k: usize, start: usize, tau: f64) -> Vec<C64> {
        let n = self.n_buckets();
        if k < self.decompositions.len() {
            self.decompositions[k].exp_row(start, tau)
        } else {
            self.decompositions[n - k]
                .exp_row(start, tau)
                .into_iter()
                .map(|z| z.conj())
                .collect()
        }
    }

    /// Largest real part across all diagonalized block spectra.
    pub fn spectral_abscissa(&self) -> f64 {
        self.decompositions
            .iter()
            .flat_map(|d| d.eigenvalues().iter().map(|l| l.re))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Free-function form of [`BlockFamily::build`] in economy mode.
pub fn build_blocks(gen: &MarkovGenerator, q: &[f64], alpha: f64, c_max: usize) -> Result<BlockFamily> {
    BlockFamily::build(gen, q, VarianceGrid::new(c_max, alpha)?, true)
}
