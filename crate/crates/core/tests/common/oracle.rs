//! Brute-force referees shared by unit and integration tests.
//!
//! Nothing here touches the eigendecomposition path: the matrix exponential is
//! a truncated Taylor series with scaling and squaring, and circulant spectra
//! are checked against faer's dense solver on materialized matrices.
#![allow(dead_code)]

use faer::Mat;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex<f64>;

pub fn to_complex(a: &Mat<f64>) -> Mat<C> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| C::new(a[(i, j)], 0.0))
}

fn inf_norm(a: &Mat<C>) -> f64 {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(t A)` by Taylor series on `t A / 2^s` followed by `s` squarings.
/// Terms are added until they fall below 1e-18 relative to the partial sum.
pub fn expm_series(a: &Mat<C>, t: f64) -> Mat<C> {
    let n = a.nrows();
    let norm = inf_norm(a) * t.abs();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = Mat::from_fn(n, n, |i, j| a[(i, j)] * (t * scale));
    let mut sum = Mat::<C>::identity(n, n);
    let mut term = Mat::<C>::identity(n, n);
    for k in 1..60 {
        term = &term * &x;
        let inv_k = 1.0 / k as f64;
        for i in 0..n {
            for j in 0..n {
                term[(i, j)] *= inv_k;
            }
        }
        sum = &sum + &term;
        if inf_norm(&term) < 1e-18 * inf_norm(&sum).max(1.0) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Dense Markov generator with rates in (0, 2) and zero row sums.
pub fn random_generator(n: usize, seed: u64) -> Mat<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Mat::<f64>::from_fn(n, n, |i, j| if i == j { 0.0 } else { rng.gen_range(0.0..2.0) });
    for i in 0..n {
        let s: f64 = (0..n).filter(|&j| j != i).map(|j| g[(i, j)]).sum();
        g[(i, i)] = -s;
    }
    g
}

/// Nonnegative per-state rates in (0, 3).
pub fn random_rates(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    (0..n).map(|_| rng.gen_range(0.0..3.0)).collect()
}

/// Dense lifted generator on (state, bucket) with index `state * n + bucket`:
/// base generator on the state, plus a ring counter `c -> c + 1` at rate
/// `q[state] / alpha`.
pub fn materialize_lift(base: &Mat<f64>, q: &[f64], alpha: f64, n: usize) -> Mat<C> {
    let m = base.nrows();
    let mut out = Mat::<C>::zeros(m * n, m * n);
    for x in 0..m {
        for y in 0..m {
            for c in 0..n {
                out[(x * n + c, y * n + c)] += C::new(base[(x, y)], 0.0);
            }
        }
        let rate = q[x] / alpha;
        for c in 0..n {
            out[(x * n + c, x * n + c)] -= C::new(rate, 0.0);
            out[(x * n + c, x * n + (c + 1) % n)] += C::new(rate, 0.0);
        }
    }
    out
}

/// Sorts complex numbers by (re, im) rounded to `1e-7` so that spectra
/// computed by different routes can be matched pairwise.
pub fn sort_spectrum(mut v: Vec<C>) -> Vec<C> {
    v.sort_by(|a, b| {
        let ka = ((a.re * 1e7).round(), (a.im * 1e7).round());
        let kb = ((b.re * 1e7).round(), (b.im * 1e7).round());
        ka.partial_cmp(&kb).unwrap()
    });
    v
}

/// Greedy multiset distance: for each element of `a`, the nearest unused
/// element of `b`; returns the worst such distance.
pub fn multiset_distance(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (idx, d) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
            .unwrap();
        used[idx] = true;
        worst = worst.max(d);
    }
    worst
}
