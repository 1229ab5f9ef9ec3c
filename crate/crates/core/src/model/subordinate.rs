//! Jumps by Bochner subordination of a diffusion generator.
//!
//! With the variance-gamma Bernstein function `phi(l) = log(1 + nu l) / nu`,
//! the subordinated generator `-phi(-L)` has eigenvalues
//! `-log(1 - nu lambda) / nu`. Up-jumps come from the strict upper triangle
//! of `L_+`, down-jumps from the strict lower triangle of `L_-`; afterwards
//! each interior row is repaired to zero drift, rescaled to the target
//! variance and closed with the diagonal.

use faer::Mat;

use super::generator::MarkovGenerator;
use super::grid::StateGrid;
use crate::error::{Result, VolspecError};
use crate::spectral::decomposition::to_complex;
use crate::spectral::{diagonalize_real, SpectralDecomposition};
use crate::C64;

/// Negative rates above this are rounding noise and clamp to zero.
pub const NEGATIVE_RATE_TOL: f64 = 1e-10;

/// What the reconstruction left behind.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SubordinationReport {
    /// Largest |imaginary part| of `-phi(-L)` before truncation.
    pub imaginary_residue: f64,
    /// Most negative off-diagonal before clamping.
    pub min_rate: f64,
}

/// `-phi(-L)`; with `nu = 0` that is `L` itself, taken verbatim.
fn subordinated(gen: &MarkovGenerator, dec: &SpectralDecomposition, nu: f64) -> Mat<C64> {
    if nu == 0.0 {
        return to_complex(gen.matrix());
    }
    dec.apply(|l| -(C64::new(1.0, 0.0) - l * nu).ln() / nu)
}

pub fn subordinate(
    gen: &MarkovGenerator,
    grid: &StateGrid<f64>,
    nu_plus: f64,
    nu_minus: f64,
    v_target: &[f64],
) -> Result<(MarkovGenerator, SubordinationReport)> {
    if !(nu_plus >= 0.0 && nu_minus >= 0.0) {
        return Err(VolspecError::Config(format!(
            "jump variance rates must be >= 0, got nu+ = {nu_plus}, nu- = {nu_minus}"
        )));
    }
    if nu_plus == 0.0 && nu_minus == 0.0 {
        return Ok((gen.clone(), SubordinationReport::default()));
    }
    let n = gen.dim();
    if n != grid.len() || v_target.len() != n {
        return Err(VolspecError::Config(
            "subordination needs one level and one target variance per state".into(),
        ));
    }

    let dec = diagonalize_real(gen.matrix())?;
    let upper = subordinated(gen, &dec, nu_plus);
    let lower = if nu_minus == nu_plus {
        upper.clone()
    } else {
        subordinated(gen, &dec, nu_minus)
    };

    let mut report = SubordinationReport::default();
    let mut m = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let z = if j > i { upper[(i, j)] } else { lower[(i, j)] };
            report.imaginary_residue = report.imaginary_residue.max(z.im.abs());
            report.min_rate = report.min_rate.min(z.re);
            m[(i, j)] = clamp_rate(z.re, i, j)?;
        }
    }

    let f = grid.levels();
    for x in 1..n - 1 {
        let drift: f64 = (0..n).filter(|&y| y != x).map(|y| m[(x, y)] * (f[y] - f[x])).sum();
        if drift > 0.0 {
            m[(x, x - 1)] += drift / (f[x] - f[x - 1]);
        } else if drift < 0.0 {
            m[(x, x + 1)] += -drift / (f[x + 1] - f[x]);
        }
        let second: f64 = (0..n)
            .filter(|&y| y != x)
            .map(|y| m[(x, y)] * (f[y] - f[x]).powi(2))
            .sum();
        if v_target[x] > 0.0 {
            if !(second > 0.0) {
                return Err(VolspecError::Numerical(format!(
                    "row {x} has no spot variance left to rescale"
                )));
            }
            let scale = v_target[x] / second;
            for y in 0..n {
                m[(x, y)] *= scale;
            }
        } else {
            for y in 0..n {
                m[(x, y)] = 0.0;
            }
        }
    }
    // Absorbing ends stay absorbing.
    for y in 0..n {
        m[(0, y)] = 0.0;
        m[(n - 1, y)] = 0.0;
    }
    for x in 0..n {
        m[(x, x)] = 0.0;
        let off: f64 = (0..n).map(|y| m[(x, y)]).sum();
        m[(x, x)] = -off;
    }
    Ok((MarkovGenerator::new(m, gen.space())?, report))
}

fn clamp_rate(r: f64, i: usize, j: usize) -> Result<f64> {
    if r >= 0.0 {
        Ok(r)
    } else if r > -NEGATIVE_RATE_TOL {
        Ok(0.0)
    } else {
        Err(VolspecError::Numerical(format!(
            "subordinated rate {r:.3e} at ({i}, {j}) is negative"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::cev::{build_cev_generator, RegimeParams};
    use crate::model::grid::build_elliptical_grid;

    fn setup(n: usize) -> (StateGrid<f64>, MarkovGenerator, Vec<f64>) {
        let grid = build_elliptical_grid(n, 100.0, 400.0, 25.0).unwrap();
        let p = RegimeParams {
            sigma: 0.2,
            beta: 0.5,
            sigma_bar: 0.6,
            nu_minus: 0.0,
            nu_plus: 0.0,
            level: 100.0,
        };
        let g = build_cev_generator(&grid, &p, 100.0).unwrap();
        let target: Vec<f64> = grid
            .levels()
            .iter()
            .enumerate()
            .map(|(x, &f)| if grid.is_interior(x) { p.local_vol(f, 100.0).powi(2) } else { 0.0 })
            .collect();
        (grid, g, target)
    }

    #[test]
    fn zero_rates_leave_generator_untouched() {
        let (grid, g, target) = setup(11);
        let (out, _) = subordinate(&g, &grid, 0.0, 0.0, &target).unwrap();
        for i in 0..11 {
            for j in 0..11 {
                assert_eq!(out.rate(i, j), g.rate(i, j));
            }
        }
    }

    #[test]
    fn three_state_moments_after_down_jumps() {
        let grid = StateGrid::new(vec![90.0, 100.0, 110.0], 1).unwrap();
        let p = RegimeParams {
            sigma: 0.2,
            beta: 1.0,
            sigma_bar: 10.0,
            nu_minus: 0.15,
            nu_plus: 0.0,
            level: 100.0,
        };
        let g = build_cev_generator(&grid, &p, 100.0).unwrap();
        let target = vec![0.0, 400.0, 0.0];
        let (out, report) = subordinate(&g, &grid, 0.0, 0.15, &target).unwrap();
        let f = grid.levels();
        assert!(out.row_sum_error() < 1e-12);
        assert!(out.moment(1, f, 1).abs() < 1e-8 * 100.0);
        assert!((out.moment(1, f, 2) - 400.0).abs() < 1e-8 * 400.0);
        assert!(report.imaginary_residue <= 1e-9);
    }

    #[test]
    fn jumps_reach_beyond_neighbours() {
        let (grid, g, target) = setup(21);
        let (out, report) = subordinate(&g, &grid, 0.05, 0.2, &target).unwrap();
        let f = grid.levels();
        let s = grid.spot_index();
        assert!(out.rate(s, s - 3) > 0.0);
        assert!(out.rate(s, s + 3) > 0.0);
        assert!(report.imaginary_residue <= 1e-9);
        for x in 1..20 {
            assert!(out.moment(x, f, 1).abs() < 1e-8 * f[x]);
            assert!((out.moment(x, f, 2) / target[x] - 1.0).abs() < 1e-8);
        }
        for y in 0..21 {
            assert_eq!(out.rate(0, y), 0.0);
            assert_eq!(out.rate(20, y), 0.0);
        }
    }

    #[test]
    fn one_sided_jumps_keep_the_other_side_local() {
        let (grid, g, target) = setup(21);
        let (out, _) = subordinate(&g, &grid, 0.0, 0.2, &target).unwrap();
        let s = grid.spot_index();
        assert!(out.rate(s, s - 3) > 0.0);
        for y in s + 2..21 {
            assert_eq!(out.rate(s, y), 0.0);
        }
    }
}
