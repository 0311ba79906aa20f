use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wigner_bounds::fuzz::TrialConfig;
use wigner_bounds::report::{self, ExitStatus, Format};
use wigner_bounds::{Error, QuadratureConfig};

/// Environment variable naming the worker thread count.
const THREADS_ENV: &str = "WIGNER_BOUNDS_THREADS";

#[derive(Parser)]
#[command(name = "wigner-bounds", version, about = "Purity-based lower bounds on the Wigner entropy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output format.
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Purity thresholds mu_n for n = 2..=n_max and their limit.
    Thresholds {
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Constraint checks and bound hierarchy for one JSON state record.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 32)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        abs_tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Randomized property checks on coherent-state mixtures.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 32)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        abs_tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Flat-top entropy against the vacuum value over a purity range.
    Sharpness {
        #[arg(long, default_value_t = 0.5)]
        mu_min: f64,
        #[arg(long, default_value_t = 1.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[command(flatten)]
        output: Output,
    },
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Domain(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    if n == 0 {
        return Err(Error::Domain(format!("{THREADS_ENV} must be positive")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitStatus, Error> {
    configure_threads()?;
    let (text, status, out) = match cli.command {
        Command::Thresholds { n_max, output } => {
            let fmt: Format = output.format.parse()?;
            (report::cmd_thresholds(n_max, fmt)?, ExitStatus::Success, output.out)
        }
        Command::Analyze { spec, n_max, abs_tol, output } => {
            let fmt: Format = output.format.parse()?;
            let cfg = QuadratureConfig { abs_tol, ..QuadratureConfig::default() };
            let r = report::cmd_analyze(&spec, n_max, &cfg, fmt)?;
            (r.text, r.status, output.out)
        }
        Command::Fuzz { seed, trials, n_max, abs_tol, output } => {
            let fmt: Format = output.format.parse()?;
            let config = TrialConfig {
                seed,
                trials,
                n_max,
                cfg: QuadratureConfig { abs_tol, ..QuadratureConfig::default() },
                ..TrialConfig::default()
            };
            let (r, _) = report::cmd_fuzz(&config, fmt)?;
            (r.text, r.status, output.out)
        }
        Command::Sharpness { mu_min, mu_max, steps, output } => {
            let fmt: Format = output.format.parse()?;
            (report::cmd_sharpness(mu_min, mu_max, steps, fmt)?, ExitStatus::Success, output.out)
        }
    };
    emit(&text, &out)?;
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ExitStatus::for_error(&e).code() as u8)
        }
    }
}
