mod config;
mod report;
mod run;

use clap::{Parser, Subcommand};
use config::{parse_grid, ConfigError, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit status when an assertion fails.
const EXIT_ASSERTION: u8 = 1;
/// Exit status for unreadable or invalid configurations.
const EXIT_CONFIG: u8 = 2;
/// Exit status when a solve fails or outputs cannot be written.
const EXIT_RUN: u8 = 3;

#[derive(Parser)]
#[command(name = "fracfp", version, about = "Run time-fractional Fokker-Planck experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory (default: output.dir of the config, else `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated alphas replacing the configured grid.
        #[arg(long, allow_hyphen_values = true)]
        alpha_grid: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List the named coefficient expressions.
    Catalog,
}

fn load(path: &PathBuf, grid: Option<&str>, seed: Option<u64>) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError { line: None, message: format!("cannot read {}: {e}", path.display()) })?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(list) = grid {
        cfg.override_alphas(parse_grid(list)?)?;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate(None)?;
    Ok(cfg)
}

fn run(config: PathBuf, out: Option<PathBuf>, grid: Option<String>, seed: Option<u64>, jobs: Option<usize>) -> ExitCode {
    let cfg = match load(&config, grid.as_deref(), seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = jobs {
        if k == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(EXIT_CONFIG);
        }
        pool = pool.num_threads(k);
    }
    let outcome = match pool.build() {
        Ok(p) => p.install(|| run::run(&cfg)),
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_RUN);
        }
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: solver failure in {e}");
            return ExitCode::from(EXIT_RUN);
        }
    };
    let report = report::ExperimentReport::new(&cfg, &outcome);
    let dir = out.or_else(|| cfg.output.dir.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
    match report::write_all(&dir, &report, &outcome, cfg.output.format) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {p}");
            }
        }
        Err(e) => {
            eprintln!("error: writing {}: {e}", dir.display());
            return ExitCode::from(EXIT_RUN);
        }
    }
    for a in &report.assertions {
        println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ASSERTION)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, alpha_grid, seed, jobs } => run(config, out, alpha_grid, seed, jobs),
        Command::Catalog => {
            print!("{}", fracfp_core::catalog::listing());
            ExitCode::SUCCESS
        }
    }
}
