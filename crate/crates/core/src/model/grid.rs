//! Forward-price lattice.

use crate::error::{Result, VolspecError};
use crate::scalar::Real;

/// Default stretch of the sinh map; larger values pack more nodes near spot.
pub const SINH_STRETCH: f64 = 4.0;

/// Strictly increasing positive forward levels with a node exactly at spot.
#[derive(Debug, Clone, PartialEq)]
pub struct StateGrid<T> {
    levels: Vec<T>,
    spot_index: usize,
}

impl<T: Real> StateGrid<T> {
    pub fn new(levels: Vec<T>, spot_index: usize) -> Result<Self> {
        if levels.len() < 2 {
            return Err(VolspecError::Domain("grid needs at least two levels".into()));
        }
        if spot_index >= levels.len() {
            return Err(VolspecError::Domain(format!(
                "spot index {spot_index} outside grid of {} levels",
                levels.len()
            )));
        }
        if !(levels[0] > T::zero()) || levels.iter().any(|l| !l.is_finite()) {
            return Err(VolspecError::Domain("grid levels must be finite and > 0".into()));
        }
        if let Some(w) = levels.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(VolspecError::Domain(format!(
                "grid not strictly increasing at node {}",
                w + 1
            )));
        }
        Ok(Self { levels, spot_index })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn level(&self, x: usize) -> T {
        self.levels[x]
    }

    pub fn spot_index(&self) -> usize {
        self.spot_index
    }

    pub fn spot(&self) -> T {
        self.levels[self.spot_index]
    }

    pub fn is_interior(&self, x: usize) -> bool {
        x > 0 && x + 1 < self.len()
    }

    /// Node whose level is closest to `f` in log distance.
    pub fn nearest(&self, f: T) -> usize {
        let lf = f.ln();
        let mut best = 0;
        let mut best_d = T::infinity();
        for (i, &l) in self.levels.iter().enumerate() {
            let d = (l.ln() - lf).abs();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }
}

/// Lattice `F(u) = spot * exp(lambda * sinh(c u))` over a uniform `u` grid
/// with `c = 4`. Node `n / 2` sits at `u = 0`, so its level is exactly `spot`;
/// the longer side spans `|u| <= 1`, and `lambda` is chosen separately for the
/// two sides so the end nodes land on `bottom` and `top`.
pub fn build_elliptical_grid<T: Real>(n_points: usize, spot: T, top: T, bottom: T) -> Result<StateGrid<T>> {
    build_stretched_grid(n_points, spot, top, bottom, T::lit(SINH_STRETCH))
}

/// [`build_elliptical_grid`] with an explicit stretch `c > 0`.
pub fn build_stretched_grid<T: Real>(
    n_points: usize,
    spot: T,
    top: T,
    bottom: T,
    stretch: T,
) -> Result<StateGrid<T>> {
    if !(stretch > T::zero()) {
        return Err(VolspecError::Domain(format!("grid stretch {stretch} must be > 0")));
    }
    if n_points < 5 {
        return Err(VolspecError::Domain(format!(
            "grid needs at least 5 points, got {n_points}"
        )));
    }
    if !(bottom > T::zero() && bottom < spot && spot < top) || !top.is_finite() {
        return Err(VolspecError::Domain(format!(
            "need 0 < bottom < spot < top, got bottom={bottom}, spot={spot}, top={top}"
        )));
    }
    let c = stretch;
    let spot_index = n_points / 2;
    let below = spot_index;
    let above = n_points - 1 - spot_index;
    let h = T::one() / T::from_usize(below.max(above));
    let u_low = h * T::from_usize(below);
    let u_high = h * T::from_usize(above);
    let lambda_down = (spot / bottom).ln() / (c * u_low).sinh();
    let lambda_up = (top / spot).ln() / (c * u_high).sinh();

    let mut levels: Vec<T> = (0..n_points)
        .map(|x| {
            if x < spot_index {
                let u = h * T::from_usize(spot_index - x);
                spot * (-lambda_down * (c * u).sinh()).exp()
            } else {
                let u = h * T::from_usize(x - spot_index);
                spot * (lambda_up * (c * u).sinh()).exp()
            }
        })
        .collect();
    levels[0] = bottom;
    levels[n_points - 1] = top;
    levels[spot_index] = spot;
    StateGrid::new(levels, spot_index)
}
