mod commands;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use volspec::lift::{AlphaRule, LiftParams};
use volspec::{Model, ModelConfig, VolspecError};

/// Spectral pricing of variance and volatility derivatives.
#[derive(Debug, Parser)]
#[command(name = "volspec", version)]
struct Cli {
    /// Model config: a JSON file, or the name of a bundled config.
    #[arg(long, global = true, default_value = "table1_calibrated")]
    model: String,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Write JSON at full precision instead of CSV.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for the block and path maps.
    #[arg(long, global = true, env = "VOLSPEC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct LiftArgs {
    /// Half-width C of the variance lattice (2C + 1 buckets).
    #[arg(long = "C", default_value_t = 100)]
    pub c_max: usize,

    /// Bucket spacing: `schedule` or `fixed:<v>`.
    #[arg(long, default_value = "schedule")]
    pub alpha_rule: AlphaRule,

    /// Fail on a leakage trip instead of widening the lattice.
    #[arg(long)]
    pub strict: bool,
}

impl LiftArgs {
    pub fn params(&self) -> LiftParams {
        let p = LiftParams::default().with_c_max(self.c_max).with_alpha(self.alpha_rule);
        if self.strict {
            p.strict()
        } else {
            p
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Call prices and implied vols across strikes.
    VanillaSmile {
        #[arg(long = "T", value_delimiter = ',', default_value = "0.25,0.5,1,2")]
        maturities: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "60,70,80,90,95,100,105,110,120,130,140")]
        strikes: Vec<f64>,
    },
    /// Delta, gamma and vega profiles of a call across start nodes.
    Greeks {
        #[arg(long = "T", value_delimiter = ',', default_value = "0.5,1,2")]
        maturities: Vec<f64>,
        #[arg(long, default_value_t = 100.0)]
        strike: f64,
    },
    /// Forward-start prices and implied forward vols across moneyness.
    ForwardSmile {
        /// Strike-setting date.
        #[arg(long, default_value_t = 0.25)]
        t_prime: f64,
        #[arg(long = "T", default_value_t = 1.25)]
        maturity: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.7,0.8,0.9,0.95,1,1.05,1.1,1.2,1.3")]
        moneyness: Vec<f64>,
    },
    /// Swaps, swaptions and capped vol swaps on realized variance.
    VarDerivs {
        #[arg(long = "T", value_delimiter = ',', default_value = "1")]
        maturities: Vec<f64>,
        /// Swaption strikes as multiples of sqrt(E[Sigma]).
        #[arg(long, value_delimiter = ',', default_value = "0.8,1,1.2")]
        moneyness: Vec<f64>,
        /// Cap on realized volatility for the capped vol swap.
        #[arg(long, default_value_t = 0.3)]
        cap: f64,
        #[command(flatten)]
        lift: LiftArgs,
    },
    /// Log contract, option-strip portfolio, var and vol swaps per maturity.
    VarTermStructure {
        #[arg(long = "T", value_delimiter = ',', default_value = "0.5,1,2,3,4,5")]
        maturities: Vec<f64>,
        /// Log-spacing of the strip's strikes.
        #[arg(long, default_value_t = 1e-3)]
        strike_step: f64,
        #[command(flatten)]
        lift: LiftArgs,
    },
    /// Distribution of the one-month index at future horizons.
    VixPdf {
        #[arg(long = "T", value_delimiter = ',', default_value = "0.5,1,2")]
        horizons: Vec<f64>,
        /// Bucket width in index points.
        #[arg(long, default_value_t = 0.5)]
        width: f64,
        #[arg(long, default_value_t = 1e-3)]
        strike_step: f64,
    },
    /// Joint density of terminal spot and realized variance.
    JointPdf {
        #[arg(long = "T", default_value_t = 1.0)]
        maturity: f64,
        #[command(flatten)]
        lift: LiftArgs,
    },
    /// Monte Carlo against spectral prices of the variance products.
    McCompare {
        #[arg(long = "T", value_delimiter = ',', default_value = "1,3,5")]
        maturities: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.8,1,1.2")]
        moneyness: Vec<f64>,
        #[command(flatten)]
        lift: LiftArgs,
    },
}

fn load_model(spec: &str) -> volspec::Result<ModelConfig> {
    let path = Path::new(spec);
    if path.exists() {
        ModelConfig::from_path(path)
    } else if ModelConfig::bundled_text(spec).is_some() {
        ModelConfig::bundled(spec)
    } else {
        Err(VolspecError::Config(format!(
            "{spec:?} is neither a file nor a bundled model ({})",
            ModelConfig::bundled_names().collect::<Vec<_>>().join(", ")
        )))
    }
}

fn run(cli: Cli) -> volspec::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| VolspecError::Config(format!("thread pool: {e}")))?;
    }
    let config = load_model(&cli.model)?;
    let hash = report::config_hash(&config)?;
    let clock = Instant::now();
    let model = Model::new(config)?;
    let report = commands::dispatch(&model, &cli.command)?;
    let elapsed = clock.elapsed().as_secs_f64();

    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_report(&report, &hash, cli.json, &mut w)?;
            w.flush()?;
            // wall time lives outside the report so reruns are byte-identical
            let sidecar = path.with_extension("time.json");
            std::fs::write(sidecar, serde_json::json!({ "wall_time_s": elapsed }).to_string())?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_report(&report, &hash, cli.json, &mut lock)?;
            lock.flush()?;
        }
    }
    eprintln!("volspec {}: wall time {elapsed:.3} s", report.command);

    match report.diagnostics.violation() {
        Some(msg) => Err(VolspecError::Numerical(msg)),
        None => Ok(()),
    }
}

fn write_report<W: Write>(report: &report::Report, hash: &str, json: bool, out: &mut W) -> volspec::Result<()> {
    if json {
        serde_json::to_writer_pretty(&mut *out, &report.to_json(hash))?;
        writeln!(out)?;
        Ok(())
    } else {
        report.write_csv(hash, out)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("volspec: {e}");
            if e.is_config() || matches!(e, VolspecError::Io(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
