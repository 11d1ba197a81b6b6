//! The data augmentation chain: `ξ = 1/τ` update, latent draw, joint
//! Gaussian draw of `(α, β)`, and multi-chain orchestration.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{sample_warm_start, warm_start};
use crate::distributions::{sample_inv_gaussian, InvGaussianParams};
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::linalg::sample_precision_gaussian;
use crate::models::{conditional_gaussian, draw_latent, Dataset, LatentVector};

/// Per-chain random stream.
pub type RandomStream = ChaCha8Rng;

/// Diagonal jitter for the single retry after a failed factorization.
pub const CHOLESKY_JITTER: f64 = 1e-10;

/// Stream for chain `chain` of a run seeded with `seed`. Each chain gets its
/// own ChaCha stream under the same key, so chain outputs do not depend on
/// how many other chains run or how threads are scheduled.
pub fn chain_stream(seed: u64, chain: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub iteration: u64,
}

impl ChainState {
    pub fn new(alpha: f64, beta: Vec<f64>) -> Self {
        Self { alpha, beta, iteration: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub iterations: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub chains: u64,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::param("iterations must be positive"));
        }
        if self.thin == 0 {
            return Err(Error::param("thin must be positive"));
        }
        if self.chains == 0 {
            return Err(Error::param("chains must be positive"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::param(format!(
                "burn_in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        Ok(())
    }

    /// Number of states a chain that runs to completion stores.
    pub fn stored_per_chain(&self) -> u64 {
        (self.iterations - self.burn_in) / self.thin
    }

    fn keeps(&self, t: u64) -> bool {
        t > self.burn_in && (t - self.burn_in).is_multiple_of(self.thin)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialDistribution {
    /// Gaussian warm start built from the likelihood's quadratic majorization.
    #[default]
    WarmStart,
    /// Point mass at `α = 0, β = 0`; meant for debugging.
    Origin,
}

/// Draws `ξ_j = 1/τ_j ~ InvGaussian(λ/|β_j|, λ²)`; `β_j = 0` takes the Lévy path.
pub fn update_xi<R: rand::Rng + ?Sized>(beta: &[f64], lambda: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    beta.iter()
        .map(|&b| Ok(sample_inv_gaussian(&InvGaussianParams::from_tilt(b, lambda)?, rng)))
        .collect()
}

/// Auxiliary variables drawn during one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub xi: Vec<f64>,
    pub latent: LatentVector,
}

/// One iteration, also returning the auxiliary draws.
pub fn step_traced<R: rand::Rng + ?Sized>(
    data: &Dataset,
    state: &ChainState,
    rng: &mut R,
) -> Result<(ChainState, StepTrace)> {
    let xi = update_xi(&state.beta, data.lambda(), rng)?;
    let latent = draw_latent(data, state.alpha, &state.beta, rng)?;
    let gaussian = conditional_gaussian(data, &latent, &xi)?;
    let draw = match sample_precision_gaussian(&gaussian, rng) {
        Err(Error::NotPositiveDefinite { .. }) => {
            sample_precision_gaussian(&gaussian.with_jitter(CHOLESKY_JITTER), rng)?
        }
        other => other?,
    };
    if draw.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "non-finite parameter draw at iteration {}",
            state.iteration + 1
        )));
    }
    let next = ChainState {
        alpha: draw[0],
        beta: draw.as_slice()[1..].to_vec(),
        iteration: state.iteration + 1,
    };
    Ok((next, StepTrace { xi, latent }))
}

/// One iteration of the chain.
pub fn step<R: rand::Rng + ?Sized>(data: &Dataset, state: &ChainState, rng: &mut R) -> Result<ChainState> {
    step_traced(data, state, rng).map(|(next, _)| next)
}

pub fn initial_state<R: rand::Rng + ?Sized>(
    data: &Dataset,
    init: InitialDistribution,
    rng: &mut R,
) -> Result<ChainState> {
    match init {
        InitialDistribution::WarmStart => {
            let ws = warm_start(data)?;
            let (alpha, beta) = sample_warm_start(&ws, data.lambda(), rng)?;
            Ok(ChainState::new(alpha, beta))
        }
        InitialDistribution::Origin => Ok(ChainState::new(0.0, vec![0.0; data.p()])),
    }
}

/// One stored state.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub chain: u64,
    pub iter: u64,
    pub alpha: f64,
    pub beta: Vec<f64>,
}

impl Draw {
    /// Coordinate `k` of `(α, β₁, …, β_p)`.
    pub fn coord(&self, k: usize) -> f64 {
        if k == 0 {
            self.alpha
        } else {
            self.beta[k - 1]
        }
    }
}

/// Stored draws of all chains, ordered by chain then iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStore {
    p: usize,
    draws: Vec<Draw>,
}

impl SampleStore {
    pub fn new(p: usize) -> Self {
        Self { p, draws: Vec::new() }
    }

    pub fn from_draws(p: usize, draws: Vec<Draw>) -> Result<Self> {
        if let Some(d) = draws.iter().find(|d| d.beta.len() != p) {
            return Err(Error::param(format!(
                "draw at chain {} iter {} has {} slopes, expected {p}",
                d.chain,
                d.iter,
                d.beta.len()
            )));
        }
        Ok(Self { p, draws })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn draws(&self) -> &[Draw] {
        &self.draws
    }

    pub fn push(&mut self, draw: Draw) -> Result<()> {
        if draw.beta.len() != self.p {
            return Err(Error::param(format!("draw has {} slopes, expected {}", draw.beta.len(), self.p)));
        }
        self.draws.push(draw);
        Ok(())
    }

    /// Coordinate names `alpha, b1, …, bp`.
    pub fn coordinate_names(&self) -> Vec<String> {
        std::iter::once("alpha".to_string())
            .chain((1..=self.p).map(|j| format!("b{j}")))
            .collect()
    }

    /// Distinct chain ids in order of first appearance.
    pub fn chain_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = Vec::new();
        for d in &self.draws {
            if ids.last() != Some(&d.chain) && !ids.contains(&d.chain) {
                ids.push(d.chain);
            }
        }
        ids
    }

    /// All values of coordinate `k`, pooled over chains.
    pub fn pooled(&self, k: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d.coord(k)).collect()
    }

    /// Values of coordinate `k` for one chain, in stored order.
    pub fn chain_series(&self, chain: u64, k: usize) -> Vec<f64> {
        self.draws.iter().filter(|d| d.chain == chain).map(|d| d.coord(k)).collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("chain,iter");
        for name in self.coordinate_names() {
            out.push(',');
            out.push_str(&name);
        }
        out.push('\n');
        for d in &self.draws {
            out.push_str(&format!("{},{}", d.chain, d.iter));
            for k in 0..=self.p {
                out.push(',');
                out.push_str(&fmt_f64(d.coord(k)));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
        let headers = reader.headers().map_err(|e| Error::format(path, e.to_string()))?.clone();
        let ncols = headers.len();
        if ncols < 4 || &headers[0] != "chain" || &headers[1] != "iter" || &headers[2] != "alpha" {
            return Err(Error::format(path, "expected header chain,iter,alpha,b1,...,bp"));
        }
        let p = ncols - 3;
        for (j, name) in headers.iter().skip(3).enumerate() {
            if name != format!("b{}", j + 1) {
                return Err(Error::format(path, format!("unexpected column name {name:?}")));
            }
        }
        let mut draws = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::format(path, e.to_string()))?;
            let bad = |what: &str| Error::format(path, format!("row {}: cannot parse {what}", line + 2));
            let chain = record[0].trim().parse::<u64>().map_err(|_| bad("chain"))?;
            let iter = record[1].trim().parse::<u64>().map_err(|_| bad("iter"))?;
            let values = record
                .iter()
                .skip(2)
                .map(|s| s.trim().parse::<f64>().map_err(|_| bad("value")))
                .collect::<Result<Vec<_>>>()?;
            draws.push(Draw { chain, iter, alpha: values[0], beta: values[1..].to_vec() });
        }
        Self::from_draws(p, draws)
    }
}

/// Outcome of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub chain: u64,
    pub draws: u64,
    pub iterations_completed: u64,
    /// Diagnostic for a chain aborted by a numeric failure.
    pub failure: Option<String>,
    /// Wall clock; never serialized so that run summaries stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SampleRun {
    pub store: SampleStore,
    pub chains: Vec<ChainSummary>,
}

impl SampleRun {
    pub fn failed_chains(&self) -> impl Iterator<Item = &ChainSummary> {
        self.chains.iter().filter(|c| c.failure.is_some())
    }
}

/// Runs a single chain, keeping whatever was stored before a failure.
pub fn run_chain(data: &Dataset, config: &SamplerConfig, init: InitialDistribution, chain: u64) -> (Vec<Draw>, ChainSummary) {
    let started = Instant::now();
    let mut rng = chain_stream(config.seed, chain);
    let mut draws = Vec::with_capacity(config.stored_per_chain() as usize);
    let mut summary = ChainSummary {
        chain,
        draws: 0,
        iterations_completed: 0,
        failure: None,
        elapsed: Duration::ZERO,
    };
    let outcome = (|| -> Result<()> {
        let mut state = initial_state(data, init, &mut rng)?;
        for t in 1..=config.iterations {
            state = step(data, &state, &mut rng)?;
            summary.iterations_completed = t;
            if config.keeps(t) {
                draws.push(Draw { chain, iter: t, alpha: state.alpha, beta: state.beta.clone() });
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        summary.failure = Some(format!("iteration {}: {e}", summary.iterations_completed + 1));
    }
    summary.draws = draws.len() as u64;
    summary.elapsed = started.elapsed();
    (draws, summary)
}

/// Runs `config.chains` independent chains concurrently, one thread per chain.
pub fn run(data: &Dataset, config: &SamplerConfig, init: InitialDistribution) -> Result<SampleRun> {
    config.validate()?;
    let results: Vec<(Vec<Draw>, ChainSummary)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..config.chains)
            .map(|c| scope.spawn(move || run_chain(data, config, init, c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    });
    let mut all = Vec::new();
    let mut chains = Vec::new();
    for (draws, summary) in results {
        all.extend(draws);
        chains.push(summary);
    }
    Ok(SampleRun {
        store: SampleStore::from_draws(data.p(), all)?,
        chains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DesignMatrix;
    use crate::models::{HyperParams, ModelKind};

    fn toy(kind: ModelKind) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![(i as f64 - 3.5) / 2.0]).collect();
        let y = match kind {
            ModelKind::HeteroGaussian => vec![0.3, -1.2, 0.8, 0.0, 1.5, -0.4, 2.2, 0.9],
            _ => vec![0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0],
        };
        let gamma = (kind == ModelKind::HeteroGaussian).then_some(1.0);
        Dataset::new(kind, y, DesignMatrix::from_rows(&rows).unwrap(), HyperParams::new(1.0, 1.0, gamma).unwrap()).unwrap()
    }

    #[test]
    fn stored_count_contract() {
        let cfg = SamplerConfig { iterations: 100, burn_in: 50, thin: 5, chains: 2, seed: 1 };
        assert_eq!(cfg.stored_per_chain(), 10);
        let out = run(&toy(ModelKind::Probit), &cfg, InitialDistribution::WarmStart).unwrap();
        for c in 0..2 {
            assert_eq!(out.store.chain_series(c, 0).len(), 10);
        }
        let iters: Vec<u64> = out.store.draws().iter().filter(|d| d.chain == 0).map(|d| d.iter).collect();
        assert_eq!(iters, vec![55, 60, 65, 70, 75, 80, 85, 90, 95, 100]);
    }

    #[test]
    fn config_validation() {
        let ok = SamplerConfig { iterations: 10, burn_in: 0, thin: 1, chains: 1, seed: 0 };
        assert!(ok.validate().is_ok());
        assert!(SamplerConfig { burn_in: 10, ..ok }.validate().is_err());
        assert!(SamplerConfig { thin: 0, ..ok }.validate().is_err());
        assert!(SamplerConfig { chains: 0, ..ok }.validate().is_err());
    }

    #[test]
    fn chain_output_ignores_other_chains() {
        for kind in ModelKind::ALL {
            let data = toy(kind);
            let one = SamplerConfig { iterations: 40, burn_in: 10, thin: 3, chains: 1, seed: 77 };
            let three = SamplerConfig { chains: 3, ..one };
            let a = run(&data, &one, InitialDistribution::WarmStart).unwrap();
            let b = run(&data, &three, InitialDistribution::WarmStart).unwrap();
            let b0: Vec<Draw> = b.store.draws().iter().filter(|d| d.chain == 0).cloned().collect();
            assert_eq!(a.store.draws(), &b0[..]);
            let again = run(&data, &three, InitialDistribution::WarmStart).unwrap();
            assert_eq!(again.store, b.store);
        }
    }

    #[test]
    fn xi_stays_positive() {
        for kind in ModelKind::ALL {
            let data = toy(kind);
            let mut rng = chain_stream(5, 0);
            let mut state = ChainState::new(0.0, vec![0.0]);
            for _ in 0..500 {
                let (next, trace) = step_traced(&data, &state, &mut rng).unwrap();
                assert!(trace.xi.iter().all(|x| *x > 0.0 && x.is_finite()));
                assert_eq!(next.iteration, state.iteration + 1);
                state = next;
            }
        }
    }

    #[test]
    fn step_is_deterministic() {
        let data = toy(ModelKind::Logistic);
        let s = ChainState::new(0.2, vec![-0.1]);
        let a = step(&data, &s, &mut chain_stream(9, 2)).unwrap();
        let b = step(&data, &s, &mut chain_stream(9, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn update_xi_rejects_bad_lambda() {
        assert!(update_xi(&[1.0], 0.0, &mut chain_stream(0, 0)).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let cfg = SamplerConfig { iterations: 20, burn_in: 5, thin: 2, chains: 2, seed: 3 };
        let out = run(&toy(ModelKind::HeteroGaussian), &cfg, InitialDistribution::Origin).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        out.store.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("chain,iter,alpha,b1\n"));
        let back = SampleStore::read_csv(&path).unwrap();
        assert_eq!(back, out.store);
    }
}
