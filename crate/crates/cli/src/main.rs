use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use capcone_cli::{suites, Overrides, RunConfig};

/// Verification suites for curvature identities and stability criteria of
/// minimal capillary cones.
#[derive(Parser, Debug)]
#[command(name = "capcone", version, about)]
struct Cli {
    /// Suite to run: check-spectral, check-jets, check-boundary,
    /// scan-rigidity or full-report (default from config, else full-report)
    command: Option<String>,

    /// Config file of `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,

    /// Random seed for the sweeps
    #[arg(long)]
    seed: Option<u64>,

    /// Samples per sweep cell
    #[arg(long)]
    samples: Option<usize>,

    /// Surface dimension
    #[arg(long)]
    n: Option<usize>,

    /// Contact angle in degrees
    #[arg(long)]
    theta: Option<f64>,

    /// Competitor exponent in (0, 1)
    #[arg(long)]
    alpha: Option<f64>,

    /// Split-quadratic weight on negative curvatures
    #[arg(long)]
    a: Option<f64>,

    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,

    /// Include the exact rational-arithmetic checks
    #[arg(long)]
    exact: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        if let Err(e) = cfg.apply_file(path) {
            eprintln!("capcone: config error: {e}");
            return ExitCode::from(2);
        }
    }
    let overrides = Overrides {
        command: cli.command,
        n: cli.n,
        theta_degrees: cli.theta,
        alpha: cli.alpha,
        competitor_a: cli.a,
        samples: cli.samples,
        seed: cli.seed,
        exact: cli.exact,
        out_path: cli.out,
    };
    if let Err(e) = cfg.apply_overrides(&overrides) {
        eprintln!("capcone: config error: {e}");
        return ExitCode::from(2);
    }
    if let Err(e) = cfg.validate() {
        eprintln!("capcone: config error: {e}");
        return ExitCode::from(2);
    }

    let report = suites::run(&cfg);
    let rendered = report.render(&cfg);
    match &cfg.out_path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                eprintln!("capcone: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{rendered}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
