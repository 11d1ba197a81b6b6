//! Chain diagnostics: total variation to the quadrature oracle, lag
//! autocorrelations and effective sample size.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::distributions::discrete_tv;
use crate::error::{Error, Result};
use crate::oracle::OracleGrid;
use crate::sampler::SampleStore;

pub const DEFAULT_BINS: usize = 20;
pub const MIN_BINS: usize = 10;
pub const MAX_ACF_LAG: usize = 50;
pub const MIN_DRAWS_FOR_ESS: usize = 100;

/// Per-marginal TV between binned samples and the oracle. Bins are
/// equal-width over the oracle's axis; draws outside it land in an extra
/// overflow bin where the oracle has no mass.
pub fn tv_to_oracle(samples: &SampleStore, oracle: &OracleGrid, bins: usize) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::param("sample store is empty"));
    }
    if samples.p() != 1 {
        return Err(Error::param(format!("oracle covers p = 1, samples have p = {}", samples.p())));
    }
    if bins < MIN_BINS {
        return Err(Error::param(format!("need at least {MIN_BINS} bins, got {bins}")));
    }
    (0..2)
        .map(|k| {
            let axis = oracle.axis(k);
            let mut expected = oracle.marginal_bins(k, bins);
            expected.push(0.0);
            let total: f64 = expected.iter().sum();
            expected.iter_mut().for_each(|m| *m /= total);
            let values = samples.pooled(k);
            let mut counts = vec![0.0; bins + 1];
            for v in &values {
                counts[axis.bin_index(*v, bins).unwrap_or(bins)] += 1.0;
            }
            let n = values.len() as f64;
            counts.iter_mut().for_each(|c| *c /= n);
            discrete_tv(&counts, &expected)
        })
        .collect()
}

/// Autocovariances `γ(0), …, γ(n−1)` with divisor `n`, via zero-padded FFT.
pub fn autocovariance(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .map(|v| Complex::new(v - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in &mut buf {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = 1.0 / (size as f64 * n as f64);
    buf.iter().take(n).map(|c| c.re * scale).collect()
}

/// Autocorrelations pooled over chains (each centered on its own mean),
/// up to lag `max_lag`. `None` when every chain is constant.
fn pooled_acf(chains: &[Vec<f64>], max_lag: usize) -> Option<Vec<f64>> {
    let mut acov = vec![0.0; max_lag + 1];
    let mut weight = 0.0;
    for series in chains.iter().filter(|s| s.len() > max_lag) {
        let w = series.len() as f64;
        for (slot, g) in acov.iter_mut().zip(autocovariance(series)) {
            *slot += w * g;
        }
        weight += w;
    }
    if weight == 0.0 || !(acov[0] > 0.0) {
        return None;
    }
    let g0 = acov[0];
    Some(acov.iter().map(|g| g / g0).collect())
}

/// Geyer's initial monotone positive sequence estimate of `N/τ`, capped at `N`.
fn ess_from_acf(rho: &[f64], total: usize) -> f64 {
    let mut tau = -1.0;
    let mut prev = f64::INFINITY;
    let mut m = 0;
    while 2 * m + 1 < rho.len() {
        let pair = rho[2 * m] + rho[2 * m + 1];
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev);
        tau += 2.0 * pair;
        prev = pair;
        m += 1;
    }
    let n = total as f64;
    if tau <= 0.0 {
        return n;
    }
    (n / tau).min(n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Autocorrelation {
    pub coordinates: Vec<String>,
    /// `None` for a coordinate whose draws are all identical.
    pub ess: Vec<Option<f64>>,
    pub acf: Vec<Option<Vec<f64>>>,
    /// Coordinates with zero variance.
    pub degenerate: Vec<String>,
}

/// ESS and lag-k autocorrelations (`k ≤ 50`) for every coordinate.
pub fn ess_and_acf(samples: &SampleStore) -> Result<Autocorrelation> {
    if samples.len() < MIN_DRAWS_FOR_ESS {
        return Err(Error::param(format!(
            "need at least {MIN_DRAWS_FOR_ESS} stored states, have {}",
            samples.len()
        )));
    }
    let coordinates = samples.coordinate_names();
    let chains = samples.chain_ids();
    let shortest = chains
        .iter()
        .map(|&c| samples.chain_series(c, 0).len())
        .filter(|&len| len >= 2)
        .min()
        .unwrap_or(samples.len());
    let max_lag = MAX_ACF_LAG.min(shortest.saturating_sub(1)).max(1);
    // ESS uses the longest lag window the shortest chain allows
    let ess_lag = shortest.saturating_sub(1).max(1);
    let mut ess = Vec::new();
    let mut acf = Vec::new();
    let mut degenerate = Vec::new();
    for (k, name) in coordinates.iter().enumerate() {
        let series: Vec<Vec<f64>> = chains.iter().map(|&c| samples.chain_series(c, k)).collect();
        match pooled_acf(&series, ess_lag) {
            Some(rho) => {
                ess.push(Some(ess_from_acf(&rho, samples.len())));
                acf.push(Some(rho[..=max_lag].to_vec()));
            }
            None => {
                ess.push(None);
                acf.push(None);
                degenerate.push(name.clone());
            }
        }
    }
    Ok(Autocorrelation { coordinates, ess, acf, degenerate })
}

/// Everything `diagnose` reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub coordinates: Vec<String>,
    pub bins: usize,
    /// Per-marginal TV to the oracle; absent when no oracle applies (`p > 1`).
    pub tv_to_oracle: Option<Vec<f64>>,
    pub ess: Vec<Option<f64>>,
    pub acf: Vec<Option<Vec<f64>>>,
    pub degenerate: Vec<String>,
    /// Filled only on request, since wall clock breaks byte-reproducibility.
    pub runtime_seconds: Option<f64>,
    pub iterations_used: u64,
    pub stored_draws: usize,
}

pub fn diagnostics_report(samples: &SampleStore, oracle: Option<&OracleGrid>, bins: usize) -> Result<DiagnosticsReport> {
    let tv = oracle.map(|o| tv_to_oracle(samples, o, bins)).transpose()?;
    let ac = ess_and_acf(samples)?;
    Ok(DiagnosticsReport {
        coordinates: ac.coordinates,
        bins,
        tv_to_oracle: tv,
        ess: ac.ess,
        acf: ac.acf,
        degenerate: ac.degenerate,
        runtime_seconds: None,
        iterations_used: samples.draws().iter().map(|d| d.iter).max().unwrap_or(0),
        stored_draws: samples.len(),
    })
}
