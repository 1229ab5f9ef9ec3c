//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary under `cargo test`. Failures are printed, not
//! raised, unless `VOLSPEC_ACCEPTANCE_STRICT=1` is set, in which case any FAIL
//! makes the process exit non-zero.

mod common;

use std::time::Instant;

use common::oracle::{expm_series, materialize_lift, multiset_distance, random_generator, random_rates, to_complex};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use volspec::lift::{joint_distribution, model_blocks, BlockFamily, VarianceGrid};
use volspec::mc::{compare, PathConfig};
use volspec::model::StateSpace;
use volspec::pricing::{
    greeks_profile, log_contract, portfolio, variance_distribution, vol_terms, StrikeGrid, VanillaSpec,
};
use volspec::spectral::{KernelDiagnostics, PartialCirculant};
use volspec::{CirculantRow, LiftParams, MarkovGenerator, Model, Result, TimeChange, C64};

const MATURITIES: [f64; 6] = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0];
const REFERENCE_VAR_SWAP: [f64; 6] = [10.37, 10.64, 10.99, 11.20, 11.34, 11.45];
const CALIBRATED_GAP_T1: f64 = 0.5355;
const NOISE_FLOOR: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Kernel health collected across criteria 2 to 7.
#[derive(Default)]
struct KernelLog {
    worst: Option<KernelDiagnostics>,
    count: usize,
    offenders: Vec<String>,
}

impl KernelLog {
    fn record(&mut self, source: &str, d: KernelDiagnostics) {
        self.count += 1;
        if !d.is_valid() {
            self.offenders.push(format!("{source}: {d:?}"));
        }
        self.worst = Some(self.worst.map_or(d, |w| w.merge(d)));
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn c1_block_equivalence() -> Result<Outcome> {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let (mut worst_block, mut worst_lift, mut worst_layout) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut lift_cases = 0;
    for inst in 0..50u64 {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(3..=7);
        let alpha = rng.gen_range(0.2..1.0);
        let t = rng.gen_range(0.1..1.5);
        let base = random_generator(m, 7_000 + inst);
        let q = random_rates(m, 7_000 + inst);

        let dense = materialize_lift(&base, &q, alpha, n);
        let reference = expm_series(&dense, t);

        let rows = q.iter().map(|&qi| CirculantRow::shift_generator(qi / alpha, n)).collect();
        let op = PartialCirculant::new(to_complex(&base), rows)?;
        let mat = op.materialize();
        for i in 0..m * n {
            for j in 0..m * n {
                worst_layout = worst_layout.max((mat[(i, j)] - dense[(i, j)]).norm());
            }
        }
        let blockwise = op.apply_holomorphic(|z| (z * t).exp())?;
        for i in 0..m * n {
            for j in 0..m * n {
                worst_block = worst_block.max((blockwise[(i, j)] - reference[(i, j)]).norm());
            }
        }

        // odd ring sizes are also run through the lift's own joint kernel
        if n % 2 == 1 {
            lift_cases += 1;
            let gen = MarkovGenerator::new(base.clone(), StateSpace::Spot { n: m })?;
            let grid = VarianceGrid::new((n - 1) / 2, alpha)?;
            let economy = inst % 2 == 0;
            let family = BlockFamily::build(&gen, &q, grid, economy)?;
            for start in 0..m {
                let jd = joint_distribution(&family, start, 0.0, t, &TimeChange::identity())?;
                for y in 0..m {
                    for d in 0..n {
                        let exact = reference[(start * n, y * n + d)];
                        worst_lift = worst_lift.max((jd.prob(y, d) - exact.re).abs().max(exact.im.abs()));
                    }
                }
            }
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    let worst = worst_block.max(worst_lift).max(worst_layout);
    Ok(Outcome::new(
        worst <= 1e-9 && secs < 10.0,
        format!(
            "block formula {worst_block:.2e}, lift joint kernel {worst_lift:.2e} ({lift_cases} odd-n cases), \
             layout {worst_layout:.2e}; limit 1e-9; {secs:.2} s (limit 10 s)"
        ),
    ))
}

fn c2_marginalization(model: &Model, log: &mut KernelLog) -> Result<Outcome> {
    let clock = Instant::now();
    let params = LiftParams::default().strict();
    let mut parts = Vec::new();
    let mut worst = 0.0_f64;
    for t in [0.5, 1.0, 5.0] {
        let family = model_blocks(model, 0.0, t, &params)?;
        // the leakage guard is not part of this identity, so the joint kernel
        // is taken as computed
        let jd = joint_distribution(&family, model.start_state(), 0.0, t, model.time_change())?;
        let (row, d) = model.kernel_row(model.start_state(), 0.0, t)?;
        log.record(&format!("c2 spot kernel T={t}"), d);
        log.record(&format!("c2 joint kernel T={t}"), jd.diagnostics().as_kernel());
        let err = max_abs_diff(&jd.spot_marginal(), &row);
        worst = worst.max(err);
        parts.push(format!("T={t}: {err:.2e}"));
    }
    let secs = clock.elapsed().as_secs_f64();
    Ok(Outcome::new(
        worst <= 1e-10 && secs < 180.0,
        format!("{}; limit 1e-10; {secs:.1} s (limit 180 s)", parts.join(", ")),
    ))
}

struct TermRow {
    t: f64,
    log: f64,
    portfolio: Option<f64>,
    var_swap: f64,
    vol_swap: f64,
}

fn term_structure(model: &Model, name: &str, with_portfolio: bool, log: &mut KernelLog) -> Result<Vec<TermRow>> {
    let params = LiftParams::default();
    let mut rows = Vec::new();
    for &t in &MATURITIES {
        let lc = log_contract(model, t)?;
        let (_, d) = model.kernel_row(model.start_state(), 0.0, t)?;
        log.record(&format!("{name} spot kernel T={t}"), d);
        let dist = variance_distribution(model, 0.0, t, &params)?;
        log.record(&format!("{name} joint kernel T={t}"), dist.diagnostics.as_kernel());
        let pf = if with_portfolio {
            Some(portfolio(model, t, &StrikeGrid::default())?.vol_terms)
        } else {
            None
        };
        rows.push(TermRow {
            t,
            log: lc.vol_terms,
            portfolio: pf,
            var_swap: vol_terms(dist.pdf.mean()),
            vol_swap: 100.0 * dist.pdf.expectation(|s| s.max(0.0).sqrt()),
        });
    }
    Ok(rows)
}

fn c3_nojump_consistency(rows: &[TermRow]) -> Outcome {
    let worst = rows.iter().map(|r| (r.log - r.var_swap).abs()).fold(0.0, f64::max);
    let jensen = rows.iter().all(|r| r.vol_swap < r.var_swap);
    let listing: Vec<String> = rows
        .iter()
        .map(|r| format!("T={} log {:.4} var {:.4} vol {:.4}", r.t, r.log, r.var_swap, r.vol_swap))
        .collect();
    Outcome::new(
        worst < 1.0 && jensen,
        format!(
            "max |log - var| {worst:.4} (limit 1.0), vol < var at every T: {jensen}; {}",
            listing.join("; ")
        ),
    )
}

fn c4_reference_var_swaps(rows: &[TermRow]) -> Outcome {
    let gaps: Vec<f64> = rows.iter().zip(REFERENCE_VAR_SWAP).map(|(r, p)| r.var_swap - p).collect();
    let worst = gaps.iter().fold(0.0_f64, |a, g| a.max(g.abs()));
    let listing: Vec<String> = rows
        .iter()
        .zip(REFERENCE_VAR_SWAP)
        .map(|(r, p)| format!("T={} {:.3} vs {p}", r.t, r.var_swap))
        .collect();
    Outcome::new(
        worst <= 0.5,
        format!("max deviation {worst:.3} (limit 0.5); {}", listing.join(", ")),
    )
}

fn c5_down_jumps(rows: &[TermRow]) -> Outcome {
    let dominated = rows.iter().all(|r| r.log >= r.var_swap);
    let t1 = rows.iter().find(|r| r.t == 1.0).expect("T=1 in the maturity set");
    let gap = t1.log - t1.var_swap;
    let gaps: Vec<String> = rows.iter().map(|r| format!("T={} {:.4}", r.t, r.log - r.var_swap)).collect();
    Outcome::new(
        dominated && (gap - CALIBRATED_GAP_T1).abs() <= 0.3,
        format!(
            "log >= var at every T: {dominated}; T=1 gap {gap:.4} vs {CALIBRATED_GAP_T1} +- 0.3; gaps {}",
            gaps.join(", ")
        ),
    )
}

fn c6_replication(model: &Model, rows: &[TermRow]) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for r in rows {
        let pf = r.portfolio.expect("portfolio computed for the calibrated model");
        worst = worst.max((pf - r.log).abs());
        parts.push(format!("T={} {:.2e}", r.t, (pf - r.log).abs()));
    }
    let mut lattice = Vec::new();
    for &t in &MATURITIES {
        let grid = StrikeGrid::Lattice { lower: 0.4, upper: 2.5 };
        let pf = portfolio(model, t, &grid)?;
        let lc = log_contract(model, t)?;
        lattice.push(format!("{:.3}", (pf.vol_terms - lc.vol_terms).abs()));
    }
    Ok(Outcome::new(
        worst <= 0.05,
        format!(
            "default grid |portfolio - log| {} (limit 0.05); info: lattice strikes in [0.4F, 2.5F] give {}",
            parts.join(", "),
            lattice.join("/")
        ),
    ))
}

fn c7_monte_carlo(model: &Model, log: &mut KernelLog) -> Result<Outcome> {
    let clock = Instant::now();
    let maturities = [1.0, 3.0, 5.0];
    let table = compare(
        model,
        &maturities,
        &PathConfig::new(100_000, 5.0, 42),
        &LiftParams::default(),
        &[0.8, 1.0, 1.2],
    )?;
    log.record("c7 daily kernels", table.kernel_diagnostics);
    let secs = clock.elapsed().as_secs_f64();
    let mut pass = secs < 900.0;
    let mut parts = Vec::new();
    for &t in &maturities {
        let (s, mc) = match (table.row(t, true), table.row(t, false)) {
            (Some(s), Some(mc)) => (s, mc),
            _ => return Ok(Outcome::new(false, format!("missing rows at T={t}"))),
        };
        let tol = (2.0 * mc.std_errors[0]).max(0.15);
        let var_ok = (s.var_swap - mc.var_swap).abs() <= tol;
        let vol_sign = s.vol_swap > mc.vol_swap;
        let opt_sign = s.options.iter().zip(&mc.options).all(|(a, b)| a < b);
        pass &= var_ok && vol_sign && opt_sign;
        let opt_gaps: Vec<String> = s.options.iter().zip(&mc.options).map(|(a, b)| format!("{:+.3}", a - b)).collect();
        parts.push(format!(
            "T={t}: var {:.3} vs {:.3} (tol {tol:.3}) {}; vol gap {:+.3} {}; swaption gaps [{}] {}",
            s.var_swap,
            mc.var_swap,
            if var_ok { "ok" } else { "off" },
            s.vol_swap - mc.vol_swap,
            if vol_sign { "ok" } else { "wrong sign" },
            opt_gaps.join(" "),
            if opt_sign { "ok" } else { "wrong sign" },
        ));
    }
    Ok(Outcome::new(pass, format!("{}; {secs:.1} s (limit 900 s)", parts.join("; "))))
}

fn c8_kernel_validity(log: &KernelLog) -> Outcome {
    let detail = match log.worst {
        Some(w) => format!(
            "{} kernels, worst mass error {:.2e}, min entry {:.2e}, residue {:.2e}",
            log.count, w.max_row_sum_error, w.min_entry, w.imaginary_residue
        ),
        None => "no kernels recorded".into(),
    };
    if log.offenders.is_empty() {
        Outcome::new(log.count > 0, detail)
    } else {
        Outcome::new(false, format!("{detail}; offenders: {}", log.offenders.join("; ")))
    }
}

fn c9_circulants() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut worst_spec, mut worst_inv) = (0.0_f64, 0.0_f64);
    for i in 0..100 {
        let n = rng.gen_range(1..=64);
        let row: Vec<C64> = (0..n)
            .map(|_| {
                let im = if i % 2 == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) };
                C64::new(rng.gen_range(-1.0..1.0), im)
            })
            .collect();
        let circ = CirculantRow::new(row.clone());
        let spectrum = circ.spectrum();
        let dense_rows = circ.to_dense();
        let dense = Mat::from_fn(n, n, |a, b| dense_rows[a][b]);
        let eig = dense
            .eigenvalues()
            .map_err(|e| volspec::VolspecError::Numerical(format!("dense eigensolver: {e:?}")))?;
        worst_spec = worst_spec.max(multiset_distance(&spectrum, &eig));
        let back = CirculantRow::from_spectrum(&spectrum);
        for (a, b) in back.first_row().iter().zip(&row) {
            worst_inv = worst_inv.max((a - b).norm());
        }
    }
    Ok(Outcome::new(
        worst_spec <= 1e-10 && worst_inv <= 1e-12,
        format!("spectrum vs dense {worst_spec:.2e} (limit 1e-10), inversion {worst_inv:.2e} (limit 1e-12)"),
    ))
}

fn leak_at(model: &Model, t: f64, params: &LiftParams) -> Result<f64> {
    let family = model_blocks(model, 0.0, t, params)?;
    let jd = joint_distribution(&family, model.start_state(), 0.0, t, model.time_change())?;
    Ok(jd.leakage_probability(params.leakage_buckets))
}

fn c10_leakage(calibrated: &Model) -> Result<Outcome> {
    let params = LiftParams::default().strict();
    let leak = leak_at(calibrated, 5.0, &params)?;
    let timed = Model::bundled("table1_timechanged")?;
    let timed_leak = leak_at(&timed, 5.0, &params)?;
    Ok(Outcome::new(
        leak <= 1e-4,
        format!(
            "identity clock, C=100, T=5: top-{} mass {leak:.3e} (limit 1e-4); info: time-changed clock {timed_leak:.3e}",
            params.leakage_buckets
        ),
    ))
}

fn c11_performance(model: &Model) -> Result<Outcome> {
    let params = LiftParams::default();
    let run = || -> Result<f64> {
        let clock = Instant::now();
        let family = model_blocks(model, 0.0, 1.0, &params)?;
        joint_distribution(&family, model.start_state(), 0.0, 1.0, model.time_change())?;
        Ok(clock.elapsed().as_secs_f64())
    };
    let secs = run()?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let scaling = if cores > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| volspec::VolspecError::Config(e.to_string()))?;
        let single = pool.install(run)?;
        format!("1 worker {single:.1} s, {cores} workers {secs:.1} s, speedup {:.2}", single / secs)
    } else {
        "scaling not measurable: 1 hardware thread available".into()
    };
    Ok(Outcome::new(
        secs < 60.0,
        format!(
            "{} states x {} buckets in {secs:.1} s (limit 60 s); {scaling}",
            model.dim(),
            2 * params.c_max + 1
        ),
    ))
}

fn c12_greeks(model: &Model) -> Result<Outcome> {
    let spot = model.grid().spot_index();
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [0.5, 1.0, 2.0] {
        let (points, _) = greeks_profile(model, &VanillaSpec::call(100.0, t))?;
        let argmax = |f: &dyn Fn(&volspec::pricing::GreekPoint) -> f64| {
            points
                .iter()
                .max_by(|a, b| f(a).total_cmp(&f(b)))
                .map(|p| p.node)
                .unwrap_or(usize::MAX)
        };
        let gamma_min = points.iter().map(|p| p.gamma).fold(f64::INFINITY, f64::min);
        let vegas: Vec<f64> = points.iter().filter_map(|p| p.vega).collect();
        let vega_min = vegas.iter().copied().fold(f64::INFINITY, f64::min);
        let g_node = argmax(&|p| p.gamma);
        let v_node = argmax(&|p| p.vega.unwrap_or(f64::NEG_INFINITY));
        // positivity up to the kernel noise floor used by criterion 8
        let gamma_ok = gamma_min > -NOISE_FLOOR && g_node.abs_diff(spot) <= 2;
        let vega_ok = !vegas.is_empty() && vega_min > -NOISE_FLOOR && v_node.abs_diff(spot) <= 2;
        pass &= gamma_ok && vega_ok;
        parts.push(format!(
            "T={t}: gamma peak node {g_node} min {gamma_min:.1e} {}, vega peak node {v_node} min {vega_min:.1e} {}",
            if gamma_ok { "ok" } else { "off" },
            if vega_ok { "ok" } else { "off" },
        ));
    }
    Ok(Outcome::new(pass, format!("spot node {spot}; {}", parts.join("; "))))
}

fn report(id: usize, clock: Instant, outcome: Result<Outcome>) -> bool {
    let secs = clock.elapsed().as_secs_f64();
    let outcome = outcome.unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
    print_line(id, secs, outcome)
}

fn print_line(id: usize, secs: f64, outcome: Outcome) -> bool {
    println!(
        "criterion {id:>2}: {} [{secs:.1} s] {}",
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.detail
    );
    outcome.pass
}

fn main() {
    let mut results = Vec::new();
    let mut log = KernelLog::default();

    let clock = Instant::now();
    results.push(report(1, clock, c1_block_equivalence()));

    let calibrated = match Model::bundled("table1_calibrated") {
        Ok(m) => m,
        Err(e) => {
            println!("cannot build the calibrated model: {e}");
            std::process::exit(1);
        }
    };

    let clock = Instant::now();
    results.push(report(2, clock, c2_marginalization(&calibrated, &mut log)));

    let clock = Instant::now();
    let nojump = Model::bundled("nojump_simple").and_then(|m| term_structure(&m, "nojump", false, &mut log));
    match nojump {
        Ok(rows) => {
            results.push(report(3, clock, Ok(c3_nojump_consistency(&rows))));
            results.push(report(4, Instant::now(), Ok(c4_reference_var_swaps(&rows))));
        }
        Err(e) => {
            results.push(print_line(3, 0.0, Outcome::new(false, format!("error: {e}"))));
            results.push(print_line(4, 0.0, Outcome::new(false, format!("error: {e}"))));
        }
    }

    let clock = Instant::now();
    match term_structure(&calibrated, "calibrated", true, &mut log) {
        Ok(rows) => {
            results.push(report(5, clock, Ok(c5_down_jumps(&rows))));
            let clock = Instant::now();
            results.push(report(6, clock, c6_replication(&calibrated, &rows)));
        }
        Err(e) => {
            results.push(print_line(5, 0.0, Outcome::new(false, format!("error: {e}"))));
            results.push(print_line(6, 0.0, Outcome::new(false, format!("error: {e}"))));
        }
    }

    let clock = Instant::now();
    results.push(report(7, clock, c7_monte_carlo(&calibrated, &mut log)));

    results.push(report(8, Instant::now(), Ok(c8_kernel_validity(&log))));

    let clock = Instant::now();
    results.push(report(9, clock, c9_circulants()));

    let clock = Instant::now();
    results.push(report(10, clock, c10_leakage(&calibrated)));

    let clock = Instant::now();
    results.push(report(11, clock, c11_performance(&calibrated)));

    let clock = Instant::now();
    results.push(report(12, clock, c12_greeks(&calibrated)));

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} PASS", results.len());
    let strict = std::env::var("VOLSPEC_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && passed < results.len() {
        std::process::exit(1);
    }
}
