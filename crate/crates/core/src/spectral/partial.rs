//! Partial-circulant operators and their block-diagonalization.
//!
//! A partial-circulant operator on `C^m (x) C^n` is built from an `m x m`
//! matrix `A` and `m` circulants `B^(0..m)` of size `n`:
//!
//! ```text
//! Ã[(i, c), (i, d)] = B^(i)[c][d] + A[i][i] delta_cd
//! Ã[(i, c), (j, d)] = A[i][j] delta_cd                      (i != j)
//! ```
//!
//! All circulants share the DFT eigenvectors `y^(r)`, so each subspace
//! `C^m (x) y^(r)` is invariant and `Ã` acts there as `D_r = A + Theta^(r)`
//! with `Theta^(r) = diag(lambda_r(B^(0)), ..., lambda_r(B^(m-1)))`. Any
//! holomorphic `phi` then satisfies
//!
//! ```text
//! phi(Ã)[(i, c), (j, d)] = (1/n) sum_r exp(-2 pi i r (c - d) / n) phi(D_r)[i][j]
//! ```
//!
//! which is what the lift uses; the `mn x mn` matrix is only ever materialized
//! here for testing.

use faer::{Mat, MatRef};

use super::circulant::{root_of_unity, CirculantRow};
use super::decomposition::diagonalize;
use crate::error::{Result, VolspecError};
use crate::C64;

#[derive(Debug, Clone)]
pub struct PartialCirculant {
    base: Mat<C64>,
    rows: Vec<CirculantRow<f64>>,
    n: usize,
}

impl PartialCirculant {
    pub fn new(base: Mat<C64>, rows: Vec<CirculantRow<f64>>) -> Result<Self> {
        let m = base.nrows();
        if base.ncols() != m {
            return Err(VolspecError::Domain("base operator must be square".into()));
        }
        if rows.len() != m {
            return Err(VolspecError::Domain(format!(
                "need one circulant per base state: {} rows for m = {m}",
                rows.len()
            )));
        }
        let n = rows.first().map_or(1, CirculantRow::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(VolspecError::Domain("circulants must share one size".into()));
        }
        Ok(Self { base, rows, n })
    }

    pub fn base_dim(&self) -> usize {
        self.base.nrows()
    }

    pub fn circulant_dim(&self) -> usize {
        self.n
    }

    /// Diagonal shift `Theta^(r)` as a vector.
    pub fn theta(&self, r: usize) -> Vec<C64> {
        self.rows.iter().map(|row| row.eigenvalue(r)).collect()
    }

    /// Block `D_r = A + Theta^(r)`.
    pub fn block(&self, r: usize) -> Mat<C64> {
        let theta = self.theta(r);
        let m = self.base_dim();
        Mat::from_fn(m, m, |i, j| {
            if i == j {
                self.base[(i, j)] + theta[i]
            } else {
                self.base[(i, j)]
            }
        })
    }

    pub fn blocks(&self) -> Vec<Mat<C64>> {
        (0..self.n).map(|r| self.block(r)).collect()
    }

    /// Dense `mn x mn` operator, index `i * n + c`.
    pub fn materialize(&self) -> Mat<C64> {
        let (m, n) = (self.base_dim(), self.n);
        let mut out = Mat::<C64>::zeros(m * n, m * n);
        for i in 0..m {
            for j in 0..m {
                let a = self.base[(i, j)];
                for c in 0..n {
                    out[(i * n + c, j * n + c)] += a;
                }
            }
            for c in 0..n {
                for d in 0..n {
                    out[(i * n + c, i * n + d)] += self.rows[i].entry(c, d);
                }
            }
        }
        out
    }

    /// `phi(Ã)` assembled from the blocks; `phi` must be holomorphic on a
    /// neighbourhood of the spectrum (entire functions always qualify).
    pub fn apply_holomorphic(&self, phi: impl Fn(C64) -> C64 + Sync) -> Result<Mat<C64>> {
        let (m, n) = (self.base_dim(), self.n);
        let mut block_values = Vec::with_capacity(n);
        for r in 0..n {
            let dec = diagonalize(self.block(r).as_ref()).map_err(|e| VolspecError::Block {
                block: r,
                source: Box::new(e),
            })?;
            block_values.push(dec.apply(&phi));
        }
        let scale = 1.0 / n as f64;
        let mut out = Mat::<C64>::zeros(m * n, m * n);
        for c in 0..n {
            for d in 0..n {
                let shift = (c + n - d) % n;
                for (r, values) in block_values.iter().enumerate() {
                    let phase = root_of_unity::<f64>(r * shift, n) * scale;
                    for i in 0..m {
                        for j in 0..m {
                            out[(i * n + c, j * n + d)] += phase * values[(i, j)];
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Blocks `D_j = A + Theta^(j)` for `j = 0..n`.
pub fn block_diagonalize(a: MatRef<'_, C64>, family: &[CirculantRow<f64>]) -> Result<Vec<Mat<C64>>> {
    Ok(PartialCirculant::new(a.to_owned(), family.to_vec())?.blocks())
}
