//! Synthetic datasets drawn from the three likelihoods at known parameters.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::distributions::std_normal_cdf;
use crate::error::{Error, Result};
use crate::linalg::DesignMatrix;
use crate::models::{Dataset, HyperParams, ModelKind};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrueParameters {
    pub alpha: f64,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub truth: TrueParameters,
}

/// Draws standard-normal covariates, `α ~ N(0, 1)`, slopes from
/// `Laplace(λ_true)` with `⌈sparsity·p⌉` of them zeroed at random positions,
/// then responses from the model. The dataset's prior uses `λ = λ_true`,
/// `θ = 1` and, for the heteroskedastic model, `γ = 1`.
pub fn generate_synthetic(
    kind: ModelKind,
    n: usize,
    p: usize,
    lambda_true: f64,
    sparsity: f64,
    seed: u64,
) -> Result<SyntheticData> {
    if n == 0 || p == 0 {
        return Err(Error::param(format!("n and p must be at least 1, got n = {n}, p = {p}")));
    }
    if !(lambda_true > 0.0 && lambda_true.is_finite()) {
        return Err(Error::param(format!("lambda_true must be positive, got {lambda_true}")));
    }
    if !(0.0..=1.0).contains(&sparsity) {
        return Err(Error::param(format!("sparsity must lie in [0, 1], got {sparsity}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    let alpha: f64 = rng.sample(StandardNormal);
    let mut beta: Vec<f64> = (0..p).map(|_| laplace(&mut rng, 1.0 / lambda_true)).collect();
    let zeros = ((sparsity * p as f64).ceil() as usize).min(p);
    for j in sample_indices(&mut rng, p, zeros) {
        beta[j] = 0.0;
    }
    let gamma = 1.0;
    let y: Vec<f64> = rows
        .iter()
        .map(|x| {
            let eta = alpha + x.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>();
            match kind {
                ModelKind::Probit => bernoulli(&mut rng, std_normal_cdf(eta)),
                ModelKind::Logistic => bernoulli(&mut rng, 1.0 / (1.0 + (-eta).exp())),
                ModelKind::HeteroGaussian => eta + laplace(&mut rng, 1.0 / gamma),
            }
        })
        .collect();
    let hyper = HyperParams::new(lambda_true, 1.0, (kind == ModelKind::HeteroGaussian).then_some(gamma))?;
    let dataset = Dataset::new(kind, y, DesignMatrix::from_rows(&rows)?, hyper)?;
    Ok(SyntheticData { dataset, truth: TrueParameters { alpha, beta } })
}

fn laplace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    if rng.random::<bool>() {
        scale * e
    } else {
        -scale * e
    }
}

fn bernoulli<R: Rng + ?Sized>(rng: &mut R, prob: f64) -> f64 {
    if rng.random::<f64>() < prob {
        1.0
    } else {
        0.0
    }
}
