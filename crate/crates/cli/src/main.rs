use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use spfw::config::RunConfig;
use spfw::harness::{self, EXIT_ERROR};
use spfw::verify;

#[derive(Parser)]
#[command(name = "spfw", version, about = "Saddle-point Frank-Wolfe experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its trace.
    ///
    /// Exit status: 0 converged, 2 iteration budget exhausted, 1 error.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Trace destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite of acceptance criteria and configurations.
    Verify { suite: PathBuf },
    /// Fit decay rates to a trace file.
    Ratefit { trace: PathBuf },
}

fn run(
    config: PathBuf,
    seed: Option<u64>,
    iters: Option<usize>,
    eps: Option<f64>,
    out: Option<PathBuf>,
) -> Result<i32> {
    let mut cfg = RunConfig::from_file(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = iters {
        cfg.max_iters = n;
    }
    if let Some(e) = eps {
        cfg.eps = e;
    }
    if out.is_some() {
        cfg.out = out;
    }
    cfg.validate()?;
    let result = harness::run(&cfg)?;
    if cfg.out.is_none() {
        print!("{}", result.csv);
    }
    let tr = &result.trace;
    eprintln!(
        "{}: {} after {} iterations, final gap {:.6e}",
        config.display(),
        tr.status.as_str(),
        tr.iterations(),
        tr.final_gaps.g_fw
    );
    Ok(result.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            seed,
            iters,
            eps,
            out,
        } => run(config, seed, iters, eps, out),
        Command::Verify { suite } => verify::run_suite(&suite)
            .with_context(|| format!("suite {}", suite.display()))
            .map(|report| {
                print!("{}", report.render());
                if report.passed() {
                    0
                } else {
                    1
                }
            }),
        Command::Ratefit { trace } => std::fs::read_to_string(&trace)
            .with_context(|| format!("cannot read {}", trace.display()))
            .and_then(|text| Ok(harness::ratefit(&text)?))
            .map(|fit| {
                print!("{}", fit.report());
                0
            }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
