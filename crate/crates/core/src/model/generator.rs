//! Dense Markov generators.

use faer::{Mat, MatRef};

use crate::error::{Result, VolspecError};

/// Which product space a generator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateSpace {
    /// Spot lattice only.
    Spot { n: usize },
    /// Spot x regime, state index `regime * n + x`.
    SpotRegime { n: usize, m: usize },
}

impl StateSpace {
    pub fn dim(&self) -> usize {
        match *self {
            StateSpace::Spot { n } => n,
            StateSpace::SpotRegime { n, m } => n * m,
        }
    }

    pub fn n_spot(&self) -> usize {
        match *self {
            StateSpace::Spot { n } | StateSpace::SpotRegime { n, .. } => n,
        }
    }

    pub fn n_regimes(&self) -> usize {
        match *self {
            StateSpace::Spot { .. } => 1,
            StateSpace::SpotRegime { m, .. } => m,
        }
    }

    /// `(spot index, regime)` of a flat state index.
    pub fn split(&self, s: usize) -> (usize, usize) {
        let n = self.n_spot();
        (s % n, s / n)
    }

    pub fn index(&self, x: usize, regime: usize) -> usize {
        regime * self.n_spot() + x
    }
}

/// Square real matrix with zero row sums and nonnegative off-diagonal rates.
#[derive(Debug, Clone)]
pub struct MarkovGenerator {
    matrix: Mat<f64>,
    space: StateSpace,
}

/// Absolute tolerance on off-diagonal negativity.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

impl MarkovGenerator {
    /// Wraps a matrix after checking the generator invariants: row sums
    /// within `1e-10 * max|L|` (and `1e-12` for small matrices) and
    /// off-diagonals `>= -1e-12`.
    pub fn new(matrix: Mat<f64>, space: StateSpace) -> Result<Self> {
        let g = Self { matrix, space };
        g.validate()?;
        Ok(g)
    }

    pub fn zero(space: StateSpace) -> Self {
        let n = space.dim();
        Self {
            matrix: Mat::zeros(n, n),
            space,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.matrix.nrows();
        if self.matrix.ncols() != n || n != self.space.dim() {
            return Err(VolspecError::Config(format!(
                "generator is {}x{} but its state space has {} states",
                n,
                self.matrix.ncols(),
                self.space.dim()
            )));
        }
        let tol = 1e-12_f64.max(1e-10 * self.max_abs());
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                let v = self.matrix[(i, j)];
                if !v.is_finite() {
                    return Err(VolspecError::Numerical(format!("non-finite rate at ({i}, {j})")));
                }
                if i != j && v < -OFF_DIAGONAL_TOL {
                    return Err(VolspecError::Numerical(format!(
                        "negative rate {v:.3e} at ({i}, {j})"
                    )));
                }
                sum += v;
            }
            if sum.abs() > tol {
                return Err(VolspecError::Numerical(format!(
                    "row {i} sums to {sum:.3e}"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn matrix(&self) -> MatRef<'_, f64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> Mat<f64> {
        self.matrix
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..self.matrix.ncols() {
            for i in 0..self.matrix.nrows() {
                m = m.max(self.matrix[(i, j)].abs());
            }
        }
        m
    }

    /// Largest `|row sum|`.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.matrix[(i, j)]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// `sum_y L(x, y) (F(y) - F(x))^k` for row `x` and a level per state.
    pub fn moment(&self, x: usize, levels: &[f64], k: i32) -> f64 {
        let fx = levels[x];
        (0..self.dim())
            .filter(|&y| y != x)
            .map(|y| self.matrix[(x, y)] * (levels[y] - fx).powi(k))
            .sum()
    }
}
