use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dalasso::bounds::DEFAULT_C1;
use dalasso::diagnostics::DEFAULT_BINS;
use dalasso::oracle::DEFAULT_RESOLUTION;
use dalasso::pipeline::{self, DiagnoseArgs, GenerateArgs};
use dalasso::{Error, ModelKind};

/// Data augmentation Gibbs sampler for Bayesian lasso posteriors.
#[derive(Parser)]
#[command(name = "dalasso", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic dataset (CSV plus JSON sidecar).
    Generate {
        /// probit, logistic or hetero_gaussian
        #[arg(long)]
        kind: ModelKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        lambda_true: f64,
        /// Fraction of true slopes set to zero.
        #[arg(long, default_value_t = 0.0)]
        sparsity: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the chains and write the stored draws as CSV.
    Sample {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the convergence certificates.
    Bounds {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = DEFAULT_C1)]
        c1: f64,
        #[arg(long, default_value_t = 0.01)]
        eps_bar: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// TV to the quadrature oracle, ESS and autocorrelations of stored draws.
    Diagnose {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Oracle grid points per axis.
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Include wall-clock runtime in the report.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quadrature posterior for a single-covariate dataset.
    Oracle {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Generate { kind, n, p, lambda_true, sparsity, seed, out } => {
            pipeline::generate(&GenerateArgs { kind, n, p, lambda_true, sparsity, seed, out })?;
        }
        Command::Sample { data, config, out } => {
            let result = pipeline::sample(&data, &config, &out)?;
            for chain in &result.chains {
                eprintln!(
                    "chain {}: {} draws in {:.3} s",
                    chain.chain,
                    chain.draws,
                    chain.elapsed.as_secs_f64()
                );
            }
            let failed: Vec<String> = result
                .failed_chains()
                .map(|c| format!("chain {} ({})", c.chain, c.failure.as_deref().unwrap_or("")))
                .collect();
            if !failed.is_empty() {
                return Err(Error::Numeric(format!("aborted: {}", failed.join("; "))));
            }
        }
        Command::Bounds { data, c1, eps_bar, out } => {
            pipeline::bounds(&data, c1, eps_bar, &out)?;
        }
        Command::Diagnose { samples, data, bins, resolution, timing, out } => {
            pipeline::diagnose(&DiagnoseArgs { samples, data, bins, resolution, out, timing })?;
        }
        Command::Oracle { data, resolution, out } => {
            pipeline::oracle(&data, resolution, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { 2 } else { 1 })
        }
    }
}
