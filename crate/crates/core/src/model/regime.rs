//! Level-dependent coupling of volatility regimes.

use faer::Mat;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use super::generator::{MarkovGenerator, StateSpace};
use super::grid::StateGrid;
use crate::error::{Result, VolspecError};

/// Regime-switch generator `G_gamma`, active with weight `eps_gamma(F)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SwitchGenerator {
    pub matrix: Vec<Vec<f64>>,
}

impl SwitchGenerator {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let g = Self { matrix };
        g.validate()?;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.dim();
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != m {
                return Err(VolspecError::Config(format!(
                    "switch generator row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            if row.iter().enumerate().any(|(j, &v)| j != i && !(v >= 0.0)) {
                return Err(VolspecError::Config(format!(
                    "switch generator row {i} has a negative rate"
                )));
            }
            let sum: f64 = row.iter().sum();
            if sum.abs() > 1e-12 {
                return Err(VolspecError::Config(format!(
                    "switch generator row {i} sums to {sum}"
                )));
            }
        }
        Ok(())
    }
}

/// Piecewise-linear hat weights on strictly increasing anchors, flat beyond
/// the first and last anchor. At most two weights are nonzero and they are
/// formed as `1 - w` and `w`, so they add up to one exactly.
pub fn partition_of_unity<T>(anchors: &[T], f: T) -> Vec<T>
where
    T: Num + PartialOrd + Copy,
{
    let m = anchors.len();
    let mut weights = vec![T::zero(); m];
    if m == 0 {
        return weights;
    }
    if f <= anchors[0] {
        weights[0] = T::one();
        return weights;
    }
    if f >= anchors[m - 1] {
        weights[m - 1] = T::one();
        return weights;
    }
    let k = (0..m - 1)
        .find(|&k| f < anchors[k + 1])
        .expect("f lies strictly inside the anchor range");
    let w = (f - anchors[k]) / (anchors[k + 1] - anchors[k]);
    weights[k] = T::one() - w;
    weights[k + 1] = w;
    weights
}

/// Generator on spot x regime, state index `regime * N + x`:
/// `L(x, a; y, b) = L_a(x, y) delta_ab + sum_g eps_g(F(x)) G_g(a, b) delta_xy`.
pub fn assemble_regime_generator(
    per_regime: &[MarkovGenerator],
    switches: &[SwitchGenerator],
    anchors: &[f64],
    grid: &StateGrid<f64>,
) -> Result<MarkovGenerator> {
    let m = per_regime.len();
    let n = grid.len();
    if m == 0 || switches.len() != m || anchors.len() != m {
        return Err(VolspecError::Config(format!(
            "{m} regimes need as many switch generators ({}) and anchors ({})",
            switches.len(),
            anchors.len()
        )));
    }
    if per_regime.iter().any(|g| g.dim() != n) {
        return Err(VolspecError::Config("regime generators must share the grid".into()));
    }
    if switches.iter().any(|s| s.dim() != m) {
        return Err(VolspecError::Config(format!(
            "switch generators must be {m}x{m}"
        )));
    }
    if anchors.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(VolspecError::Config("regime anchors must be strictly increasing".into()));
    }
    for s in switches {
        s.validate()?;
    }

    let space = StateSpace::SpotRegime { n, m };
    let mut out = Mat::<f64>::zeros(n * m, n * m);
    for (a, g) in per_regime.iter().enumerate() {
        for x in 0..n {
            for y in 0..n {
                out[(a * n + x, a * n + y)] = g.rate(x, y);
            }
        }
    }
    for x in 0..n {
        let eps = partition_of_unity(anchors, grid.level(x));
        for (gamma, &w) in eps.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for a in 0..m {
                for b in 0..m {
                    out[(a * n + x, b * n + x)] += w * switches[gamma].matrix[a][b];
                }
            }
        }
    }
    MarkovGenerator::new(out, space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::cev::{build_cev_generator, RegimeParams};
    use num_rational::Ratio;
    use proptest::prelude::*;

    #[test]
    fn hat_examples() {
        assert_eq!(partition_of_unity(&[95.0, 100.0], 95.0), vec![1.0, 0.0]);
        assert_eq!(partition_of_unity(&[95.0, 100.0], 97.5), vec![0.5, 0.5]);
        assert_eq!(partition_of_unity(&[95.0, 100.0], 120.0), vec![0.0, 1.0]);
        assert_eq!(partition_of_unity(&[95.0, 100.0], 10.0), vec![1.0, 0.0]);
    }

    proptest! {
        #[test]
        fn hats_sum_to_one_in_rational_arithmetic(
            gaps in proptest::collection::vec(1i64..50, 1..6),
            start in -100i64..100,
            num in -500i64..500,
            den in 1i64..20,
        ) {
            let mut anchors = vec![Ratio::from_integer(start)];
            for g in gaps {
                let last = *anchors.last().unwrap();
                anchors.push(last + Ratio::from_integer(g));
            }
            let w = partition_of_unity(&anchors, Ratio::new(num, den));
            let total: Ratio<i64> = w.iter().copied().fold(Ratio::from_integer(0), |a, b| a + b);
            prop_assert_eq!(total, Ratio::from_integer(1));
            prop_assert!(w.iter().all(|v| *v >= Ratio::from_integer(0)));
        }

        #[test]
        fn hats_sum_to_one_in_floating_point(
            a0 in 50.0f64..100.0,
            gap in 0.1f64..30.0,
            f in 0.0f64..300.0,
        ) {
            let w = partition_of_unity(&[a0, a0 + gap, a0 + 2.5 * gap], f);
            prop_assert_eq!(w.iter().sum::<f64>(), 1.0);
            prop_assert!(w.iter().all(|&v| v >= 0.0));
        }
    }

    fn grid3() -> StateGrid<f64> {
        StateGrid::new(vec![90.0, 100.0, 110.0], 1).unwrap()
    }

    fn regime(sigma: f64, level: f64) -> RegimeParams<f64> {
        RegimeParams {
            sigma,
            beta: 1.0,
            sigma_bar: 10.0,
            nu_minus: 0.0,
            nu_plus: 0.0,
            level,
        }
    }

    #[test]
    fn single_regime_is_passthrough() {
        let grid = grid3();
        let g = build_cev_generator(&grid, &regime(0.2, 100.0), 100.0).unwrap();
        let sw = SwitchGenerator::new(vec![vec![0.0]]).unwrap();
        let out = assemble_regime_generator(&[g.clone()], &[sw], &[100.0], &grid).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(out.rate(i, j), g.rate(i, j));
            }
        }
    }

    #[test]
    fn zero_switching_is_block_diagonal() {
        let grid = grid3();
        let g0 = build_cev_generator(&grid, &regime(0.2, 95.0), 100.0).unwrap();
        let g1 = build_cev_generator(&grid, &regime(0.3, 100.0), 100.0).unwrap();
        let zero = SwitchGenerator::new(vec![vec![0.0; 2]; 2]).unwrap();
        let out = assemble_regime_generator(
            &[g0.clone(), g1.clone()],
            &[zero.clone(), zero],
            &[95.0, 100.0],
            &grid,
        )
        .unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(out.rate(x, y), g0.rate(x, y));
                assert_eq!(out.rate(3 + x, 3 + y), g1.rate(x, y));
                assert_eq!(out.rate(x, 3 + y), 0.0);
                assert_eq!(out.rate(3 + x, y), 0.0);
            }
        }
    }

    #[test]
    fn coupled_rows_conserve_probability_and_drift() {
        let grid = grid3();
        let g0 = build_cev_generator(&grid, &regime(0.16, 95.0), 100.0).unwrap();
        let g1 = build_cev_generator(&grid, &regime(0.13, 100.0), 100.0).unwrap();
        let s0 = SwitchGenerator::new(vec![vec![-1.0, 1.0], vec![5.0, -5.0]]).unwrap();
        let s1 = SwitchGenerator::new(vec![vec![-5.0, 5.0], vec![7.0, -7.0]]).unwrap();
        let out = assemble_regime_generator(&[g0, g1], &[s0, s1], &[95.0, 100.0], &grid).unwrap();
        assert!(out.row_sum_error() <= 1e-12);
        let levels: Vec<f64> = (0..6).map(|s| grid.level(s % 3)).collect();
        for s in [1, 4] {
            assert!(out.moment(s, &levels, 1).abs() < 1e-8 * levels[s]);
        }
    }

    #[test]
    fn mismatched_inputs_are_config_errors() {
        let grid = grid3();
        let g = build_cev_generator(&grid, &regime(0.2, 100.0), 100.0).unwrap();
        let sw = SwitchGenerator::new(vec![vec![0.0]]).unwrap();
        let err = assemble_regime_generator(&[g.clone(), g], &[sw], &[95.0, 100.0], &grid).unwrap_err();
        assert!(err.is_config());
    }
}
