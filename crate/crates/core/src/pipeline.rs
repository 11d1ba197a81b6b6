//! File-to-file commands behind the `dalasso` binary.
//!
//! Every output except wall-clock timing is a pure function of the inputs,
//! so repeated runs with the same seed write identical bytes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{full_report, BoundReport};
use crate::diagnostics::{diagnostics_report, DiagnosticsReport};
use crate::error::{Error, Result};
use crate::io::{read_config, read_dataset, write_dataset, write_json};
use crate::models::ModelKind;
use crate::oracle::{quadrature_oracle, OracleGrid};
use crate::sampler::{run, ChainSummary, InitialDistribution, SampleRun, SampleStore, SamplerConfig};
use crate::synthetic::{generate_synthetic, TrueParameters};

#[derive(Debug, Clone)]
pub struct GenerateArgs {
    pub kind: ModelKind,
    pub n: usize,
    pub p: usize,
    pub lambda_true: f64,
    pub sparsity: f64,
    pub seed: u64,
    pub out: PathBuf,
}

/// `data.csv` → `data.truth.json`.
pub fn truth_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("truth.json")
}

/// `samples.csv` → `samples.run.json`.
pub fn run_summary_path(samples_path: &Path) -> PathBuf {
    samples_path.with_extension("run.json")
}

/// Writes the dataset CSV, its sidecar and the true parameters.
pub fn generate(args: &GenerateArgs) -> Result<TrueParameters> {
    let synth = generate_synthetic(args.kind, args.n, args.p, args.lambda_true, args.sparsity, args.seed)?;
    write_dataset(&args.out, &synth.dataset)?;
    write_json(&truth_path(&args.out), &synth.truth)?;
    Ok(synth.truth)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: SamplerConfig,
    pub initial: InitialDistribution,
    pub chains: Vec<ChainSummary>,
}

/// Runs the chains, writes the samples CSV and a run summary. Chains that
/// failed keep the draws stored before the failure; the summary says why.
pub fn sample(data_path: &Path, config_path: &Path, out: &Path) -> Result<SampleRun> {
    let data = read_dataset(data_path)?;
    let config = read_config(config_path)?;
    let initial = InitialDistribution::WarmStart;
    let result = run(&data, &config, initial)?;
    result.store.write_csv(out)?;
    let summary = RunSummary { config, initial, chains: result.chains.clone() };
    write_json(&run_summary_path(out), &summary)?;
    Ok(result)
}

pub fn bounds(data_path: &Path, c1: f64, eps_bar: f64, out: &Path) -> Result<BoundReport> {
    let data = read_dataset(data_path)?;
    let report = full_report(&data, c1, eps_bar)?;
    write_json(out, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalSummary {
    pub lo: f64,
    pub hi: f64,
    pub mean: f64,
    pub sd: f64,
    /// Mass per grid node; nodes are equally spaced from `lo` to `hi`.
    pub node_mass: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub resolution: usize,
    pub optimum: [f64; 2],
    pub total_mass: f64,
    pub alpha: MarginalSummary,
    pub beta: MarginalSummary,
}

impl OracleSummary {
    pub fn from_grid(grid: &OracleGrid) -> Self {
        let marginal = |k: usize| {
            let axis = grid.axis(k);
            MarginalSummary {
                lo: axis.lo,
                hi: axis.hi,
                mean: grid.mean(k),
                sd: grid.variance(k).sqrt(),
                node_mass: grid.marginal(k),
            }
        };
        let (a, b) = grid.optimum();
        Self {
            resolution: grid.resolution(),
            optimum: [a, b],
            total_mass: grid.total_mass(),
            alpha: marginal(0),
            beta: marginal(1),
        }
    }
}

pub fn oracle(data_path: &Path, resolution: usize, out: &Path) -> Result<OracleSummary> {
    let data = read_dataset(data_path)?;
    let grid = quadrature_oracle(&data, resolution)?;
    let summary = OracleSummary::from_grid(&grid);
    write_json(out, &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct DiagnoseArgs {
    pub samples: PathBuf,
    pub data: PathBuf,
    pub bins: usize,
    pub resolution: usize,
    pub out: PathBuf,
    /// Record wall-clock time in the report (makes the output run-dependent).
    pub timing: bool,
}

/// TV to the quadrature oracle (single-covariate data only), ESS and ACF.
pub fn diagnose(args: &DiagnoseArgs) -> Result<DiagnosticsReport> {
    let started = Instant::now();
    let data = read_dataset(&args.data)?;
    let store = SampleStore::read_csv(&args.samples)?;
    if store.p() != data.p() {
        return Err(Error::param(format!(
            "samples have p = {}, dataset has p = {}",
            store.p(),
            data.p()
        )));
    }
    let grid = if data.p() == 1 {
        Some(quadrature_oracle(&data, args.resolution)?)
    } else {
        None
    };
    let mut report = diagnostics_report(&store, grid.as_ref(), args.bins)?;
    if args.timing {
        report.runtime_seconds = Some(started.elapsed().as_secs_f64());
    }
    write_json(&args.out, &report)?;
    Ok(report)
}
