use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wdvv_cli::{cmd_correlators, cmd_curve_validate, cmd_extend, cmd_verify, CliError, RunConfig, EXIT_PASS};

#[derive(Debug, Parser)]
#[command(name = "wdvv", version, about = "Check WDVV structures built from reducible rational spectral curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Registry model name (example1, example2) or a curve file path.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Override a config entry, e.g. `tolerances.residual=1e-12` or `q=1`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output path: the report for verify/extend/curve-validate, the CSV for correlators.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Run the residual suite and write a JSON report.
    Verify,
    /// Tabulate correlators on a grid as CSV.
    Correlators,
    /// Build the unity/nilpotent extension and check it.
    Extend,
    /// Check the curve data and its residues.
    CurveValidate,
}

fn write(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), &cli.set)?;
    if let Some(m) = &cli.model {
        cfg.set_model(m);
    }
    if let Some(seed) = cli.seed {
        cfg.sample.seed = seed;
    }
    if let Some(n) = cli.samples {
        cfg.sample.count = n;
    }
    cfg.validate()?;

    if let Command::Correlators = cli.command {
        let table = cmd_correlators(&cfg)?;
        write(cli.out.or_else(|| cfg.samples_path()).as_deref(), &table.to_csv()?)?;
        return Ok(EXIT_PASS);
    }
    let report = match cli.command {
        Command::Verify => cmd_verify(&cfg)?,
        Command::Extend => cmd_extend(&cfg)?,
        Command::CurveValidate => cmd_curve_validate(&cfg)?,
        Command::Correlators => unreachable!("handled above"),
    };
    write(cli.out.or_else(|| cfg.report_path()).as_deref(), &report.to_json())?;
    if !report.passed() {
        for c in report.checks.iter().filter(|c| !c.pass) {
            eprintln!("FAIL {}: residual {:?}, tolerance {:e}", c.name, c.residual, c.tolerance);
        }
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
