//! Capped CEV local volatility and its tridiagonal lattice generator.

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::generator::{MarkovGenerator, StateSpace};
use super::grid::StateGrid;
use crate::error::{Result, VolspecError};
use crate::scalar::Real;

/// One volatility regime: CEV diffusion with a volatility cap plus jump
/// variance rates for subordination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams<T> {
    pub sigma: T,
    pub beta: T,
    pub sigma_bar: T,
    #[serde(default)]
    pub nu_minus: T,
    #[serde(default)]
    pub nu_plus: T,
    /// Anchor level of the regime's hat function.
    pub level: T,
}

impl<T: Real> RegimeParams<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = self.sigma > T::zero()
            && self.sigma_bar > T::zero()
            && self.nu_minus >= T::zero()
            && self.nu_plus >= T::zero()
            && self.level > T::zero()
            && self.beta.is_finite();
        if ok {
            Ok(())
        } else {
            Err(VolspecError::Config(format!("invalid regime parameters {self:?}")))
        }
    }

    /// Absolute local volatility `v(F) = F min(sigma (F / reference)^(beta - 1), sigma_bar)`.
    ///
    /// `reference = 1` gives the textbook CEV form; quoting the lattice
    /// relative to a spot of 100 and using `reference = 100` makes `sigma` the
    /// at-the-money volatility.
    pub fn local_vol(&self, f: T, reference: T) -> T {
        let cev = self.sigma * (f / reference).powf(self.beta - T::one());
        f * cev.min(self.sigma_bar)
    }
}

/// Tridiagonal generator matching zero drift and variance `v(F)^2` at every
/// interior node; both boundary rows are absorbing.
///
/// For an interior node with gaps `d` below and `u` above, the rates are
/// `v^2 / (d (d + u))` down and `v^2 / (u (d + u))` up.
pub fn build_cev_generator(
    grid: &StateGrid<f64>,
    params: &RegimeParams<f64>,
    reference: f64,
) -> Result<MarkovGenerator> {
    params.validate()?;
    let n = grid.len();
    let f = grid.levels();
    let mut m = Mat::<f64>::zeros(n, n);
    for x in 1..n - 1 {
        let v = params.local_vol(f[x], reference);
        let var = v * v;
        let d = f[x] - f[x - 1];
        let u = f[x + 1] - f[x];
        let down = var / (d * (d + u));
        let up = var / (u * (d + u));
        if !(down >= 0.0 && up >= 0.0) || !down.is_finite() || !up.is_finite() {
            return Err(VolspecError::Config(format!(
                "moment matching gives rates ({down:.3e}, {up:.3e}) at node {x} (F = {})",
                f[x]
            )));
        }
        m[(x, x - 1)] = down;
        m[(x, x + 1)] = up;
        m[(x, x)] = -(down + up);
    }
    MarkovGenerator::new(m, StateSpace::Spot { n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::grid::build_elliptical_grid;

    fn params(sigma: f64, beta: f64, sigma_bar: f64) -> RegimeParams<f64> {
        RegimeParams {
            sigma,
            beta,
            sigma_bar,
            nu_minus: 0.0,
            nu_plus: 0.0,
            level: 100.0,
        }
    }

    #[test]
    fn three_point_row_by_hand() {
        let grid = StateGrid::new(vec![90.0, 100.0, 110.0], 1).unwrap();
        let g = build_cev_generator(&grid, &params(0.2, 1.0, 10.0), 100.0).unwrap();
        assert!((g.rate(1, 0) - 2.0).abs() < 1e-12);
        assert!((g.rate(1, 1) + 4.0).abs() < 1e-12);
        assert!((g.rate(1, 2) - 2.0).abs() < 1e-12);
        for j in 0..3 {
            assert_eq!(g.rate(0, j), 0.0);
            assert_eq!(g.rate(2, j), 0.0);
        }
    }

    #[test]
    fn tiny_sigma_gives_near_zero_rows() {
        let grid = build_elliptical_grid(21, 100.0, 400.0, 25.0).unwrap();
        let g = build_cev_generator(&grid, &params(1e-300, 0.5, 0.6), 100.0).unwrap();
        assert!(g.max_abs() < 1e-250);
    }

    #[test]
    fn moments_match_local_variance() {
        let grid = build_elliptical_grid(76, 100.0, 10_000.0, 1.0).unwrap();
        let p = params(0.16, -0.8, 0.6);
        let g = build_cev_generator(&grid, &p, 100.0).unwrap();
        let f = grid.levels();
        for x in 1..75 {
            let v = p.local_vol(f[x], 100.0);
            assert!(g.moment(x, f, 1).abs() < 1e-8 * f[x]);
            assert!((g.moment(x, f, 2) / (v * v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_binds_far_below_spot() {
        let p = params(0.16, -0.8, 0.6);
        assert!((p.local_vol(100.0, 100.0) - 16.0).abs() < 1e-12);
        assert!((p.local_vol(5.0, 100.0) - 3.0).abs() < 1e-12);
    }
}
