use serde_json::json;
use volspec::lift::model_joint;
use volspec::mc::{compare, PathConfig};
use volspec::pricing::{
    forward_smile, greeks_profile, log_contract, portfolio, price_on_pdf, vanilla_smile, variance_distribution,
    vix_pdf, vol_terms, StrikeGrid, VanillaSpec, VariancePayoff, VixSpec,
};
use volspec::{Model, Result};

use crate::report::{Cell, Report};
use crate::Command;

pub fn dispatch(model: &Model, command: &Command) -> Result<Report> {
    match command {
        Command::VanillaSmile { maturities, strikes } => vanilla(model, maturities, strikes),
        Command::Greeks { maturities, strike } => greeks(model, maturities, *strike),
        Command::ForwardSmile { t_prime, maturity, moneyness } => fwd_smile(model, *t_prime, *maturity, moneyness),
        Command::VarDerivs { maturities, moneyness, cap, lift } => {
            var_derivs(model, maturities, moneyness, *cap, &lift.params())
        }
        Command::VarTermStructure { maturities, strike_step, lift } => {
            term_structure(model, maturities, *strike_step, &lift.params())
        }
        Command::VixPdf { horizons, width, strike_step } => vix(model, horizons, *width, *strike_step),
        Command::JointPdf { maturity, lift } => joint(model, *maturity, &lift.params()),
        Command::McCompare { maturities, paths, seed, moneyness, lift } => {
            mc(model, maturities, *paths, *seed, moneyness, &lift.params())
        }
    }
}

fn vanilla(model: &Model, maturities: &[f64], strikes: &[f64]) -> Result<Report> {
    let mut r = Report::new("vanilla-smile", &["T", "strike", "call_price", "implied_vol"]);
    for &t in maturities {
        let (points, diag) = vanilla_smile(model, t, strikes)?;
        r.diagnostics.kernel(diag);
        for p in points {
            r.push(vec![t.into(), p.strike.into(), p.price.into(), p.implied_vol.into()]);
        }
    }
    Ok(r)
}

fn greeks(model: &Model, maturities: &[f64], strike: f64) -> Result<Report> {
    let mut r = Report::new(
        "greeks",
        &["T", "node", "level", "price", "delta", "gamma", "vega"],
    );
    r.notes.push(format!("call struck at {strike}; vega by regime difference"));
    for &t in maturities {
        let (points, diag) = greeks_profile(model, &VanillaSpec::call(strike, t))?;
        r.diagnostics.kernel(diag);
        for p in points {
            r.push(vec![
                t.into(),
                p.node.into(),
                p.level.into(),
                p.price.into(),
                p.delta.into(),
                p.gamma.into(),
                p.vega.into(),
            ]);
        }
    }
    Ok(r)
}

fn fwd_smile(model: &Model, t_prime: f64, maturity: f64, moneyness: &[f64]) -> Result<Report> {
    let mut r = Report::new("forward-smile", &["t_prime", "T", "forward_strike", "price", "implied_vol"]);
    let (_, d0) = model.kernel_row(model.start_state(), 0.0, t_prime)?;
    r.diagnostics.kernel(d0);
    r.diagnostics.kernel(model.kernel(t_prime, maturity)?.diagnostics);
    for p in forward_smile(model, t_prime, maturity, moneyness)? {
        r.push(vec![
            t_prime.into(),
            maturity.into(),
            p.forward_strike.into(),
            p.price.into(),
            p.implied_vol.into(),
        ]);
    }
    Ok(r)
}

fn var_derivs(
    model: &Model,
    maturities: &[f64],
    moneyness: &[f64],
    cap: f64,
    lift: &volspec::LiftParams,
) -> Result<Report> {
    let mut r = Report::new("var-derivs", &["T", "product", "strike", "price", "vol_terms", "buckets"]);
    r.notes.push("swaption strikes are (a K0)^2 with K0 = sqrt(E[Sigma])".into());
    for &t in maturities {
        let dist = variance_distribution(model, 0.0, t, lift)?;
        r.diagnostics.kernel(dist.diagnostics.as_kernel());
        r.diagnostics.leakage(dist.leakage);
        let df = model.discount().discount(0.0, t);
        let var = price_on_pdf(&dist.pdf, &VariancePayoff::VarSwap, df)?;
        let vol = price_on_pdf(&dist.pdf, &VariancePayoff::VolSwap, df)?;
        let k0 = var.sqrt();
        let b = dist.buckets;
        r.push(vec![t.into(), "var_swap".into(), Cell::Missing, var.into(), vol_terms(var).into(), b.into()]);
        r.push(vec![t.into(), "vol_swap".into(), Cell::Missing, vol.into(), (100.0 * vol).into(), b.into()]);
        for &a in moneyness {
            let strike = (a * k0).powi(2);
            let p = price_on_pdf(&dist.pdf, &VariancePayoff::VarSwaption { strike }, df)?;
            r.push(vec![t.into(), "var_swaption".into(), strike.into(), p.into(), Cell::Missing, b.into()]);
        }
        for &a in moneyness {
            let strike = a * k0;
            let p = price_on_pdf(&dist.pdf, &VariancePayoff::VolSwaption { strike }, df)?;
            r.push(vec![t.into(), "vol_swaption".into(), strike.into(), p.into(), Cell::Missing, b.into()]);
        }
        let capped = price_on_pdf(&dist.pdf, &VariancePayoff::CappedVolSwap { strike: 0.0, cap }, df)?;
        r.push(vec![
            t.into(),
            "capped_vol_swap".into(),
            cap.into(),
            capped.into(),
            (100.0 * capped).into(),
            b.into(),
        ]);
    }
    Ok(r)
}

fn term_structure(model: &Model, maturities: &[f64], step: f64, lift: &volspec::LiftParams) -> Result<Report> {
    let mut r = Report::new(
        "var-term-structure",
        &["T", "log_contract", "portfolio", "var_swap", "vol_swap"],
    );
    r.notes.push("all columns in vol terms (100 sqrt of the variance value)".into());
    let strikes = StrikeGrid::LogUniform { step };
    for &t in maturities {
        let log = log_contract(model, t)?;
        let pf = portfolio(model, t, &strikes)?;
        let dist = variance_distribution(model, 0.0, t, lift)?;
        r.diagnostics.kernel(dist.diagnostics.as_kernel());
        r.diagnostics.leakage(dist.leakage);
        r.diagnostics.kernel(model.kernel_row(model.start_state(), 0.0, t)?.1);
        r.push(vec![
            t.into(),
            log.vol_terms.into(),
            pf.vol_terms.into(),
            vol_terms(dist.pdf.mean()).into(),
            (100.0 * dist.pdf.expectation(|s| s.max(0.0).sqrt())).into(),
        ]);
    }
    Ok(r)
}

fn vix(model: &Model, horizons: &[f64], width: f64, step: f64) -> Result<Report> {
    let mut r = Report::new("vix-pdf", &["horizon", "vix_lower", "vix_upper", "probability"]);
    let spec = VixSpec {
        strikes: StrikeGrid::LogUniform { step },
        ..VixSpec::default()
    };
    for &t in horizons {
        let pdf = vix_pdf(model, t, &spec, width)?;
        r.diagnostics.kernel(pdf.diagnostics);
        r.notes.push(format!("horizon {t}: mean index {:.4}", pdf.mean()));
        for (e, w) in pdf.edges.iter().zip(&pdf.weights) {
            if *w > 0.0 {
                r.push(vec![t.into(), (*e).into(), (e + width).into(), (*w).into()]);
            }
        }
    }
    Ok(r)
}

fn joint(model: &Model, maturity: f64, lift: &volspec::LiftParams) -> Result<Report> {
    let mut r = Report::new(
        "joint-pdf",
        &["spot_level", "regime", "realized_variance", "probability"],
    );
    let jd = model_joint(model, 0.0, maturity, lift)?;
    r.diagnostics.kernel(jd.diagnostics().as_kernel());
    r.diagnostics.leakage(jd.leakage_probability(lift.leakage_buckets));
    r.notes.push(format!(
        "T={maturity} buckets={} alpha={:e}",
        jd.n_buckets(),
        jd.alpha()
    ));
    let space = model.space();
    let levels = model.levels();
    for s in 0..jd.n_states() {
        let (_, regime) = space.split(s);
        for d in 0..jd.n_buckets() {
            let p = jd.prob(s, d);
            if p > 0.0 {
                r.push(vec![
                    levels[s].into(),
                    regime.into(),
                    (jd.alpha() * d as f64 / maturity).into(),
                    p.into(),
                ]);
            }
        }
    }
    Ok(r)
}

fn mc(
    model: &Model,
    maturities: &[f64],
    paths: usize,
    seed: u64,
    moneyness: &[f64],
    lift: &volspec::LiftParams,
) -> Result<Report> {
    let horizon = maturities.iter().copied().fold(0.0, f64::max);
    let table = compare(model, maturities, &PathConfig::new(paths, horizon, seed), lift, moneyness)?;
    let labels: Vec<String> = moneyness.iter().map(|a| format!("option_a{}", a * 100.0)).collect();
    let mut columns: Vec<String> = ["T", "method", "var_swap", "vol_swap"].map(String::from).to_vec();
    columns.extend(labels.iter().cloned());
    columns.extend(["var_swap_se".to_string(), "vol_swap_se".to_string()]);
    columns.extend(labels.iter().map(|l| format!("{l}_se")));

    let mut r = Report::with_columns("mc-compare", columns);
    r.diagnostics.kernel(table.kernel_diagnostics);
    r.diagnostics.leakage(table.max_leakage);
    r.notes.push(format!("seed {seed}; swaps in vol terms, options are 100 x variance price"));
    for row in &table.rows {
        let mut cells: Vec<Cell> = vec![row.maturity.into(), row.method.as_str().into()];
        cells.push(row.var_swap.into());
        cells.push(row.vol_swap.into());
        cells.extend(row.options.iter().map(|&x| Cell::from(x)));
        if row.std_errors.is_empty() {
            cells.extend((0..2 + moneyness.len()).map(|_| Cell::Missing));
        } else {
            cells.extend(row.std_errors.iter().map(|&x| Cell::from(x)));
        }
        r.push(cells);
    }
    r.extra = Some(json!({ "moneyness": table.moneyness }));
    Ok(r)
}
