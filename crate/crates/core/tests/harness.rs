//! Oracle, diagnostics and synthetic-data contracts.

mod common;

use dalasso::diagnostics::{ess_and_acf, tv_to_oracle};
use dalasso::distributions::{discrete_tv, std_normal_cdf};
use dalasso::linalg::DesignMatrix;
use dalasso::oracle::{quadrature_oracle, DEFAULT_RESOLUTION};
use dalasso::sampler::{chain_stream, Draw, SampleStore};
use dalasso::synthetic::generate_synthetic;
use dalasso::{Dataset, HyperParams, ModelKind};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

fn store_from(pairs: &[(f64, f64)]) -> SampleStore {
    let draws = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| Draw { chain: 0, iter: i as u64 + 1, alpha: a, beta: vec![b] })
        .collect();
    SampleStore::from_draws(1, draws).unwrap()
}

#[test]
fn flat_likelihood_recovers_laplace_prior() {
    let lambda = 1.3;
    let rows: Vec<Vec<f64>> = (0..10).map(|_| vec![0.0]).collect();
    let y: Vec<f64> = (0..10).map(|i| (i % 2) as f64).collect();
    let data = Dataset::new(ModelKind::Probit, y, DesignMatrix::from_rows(&rows).unwrap(), HyperParams::new(lambda, 1.0, None).unwrap()).unwrap();
    let grid = quadrature_oracle(&data, DEFAULT_RESOLUTION).unwrap();
    assert!((grid.total_mass() - 1.0).abs() < 1e-9);
    let axis = grid.axis(1);
    let laplace_cdf = |x: f64| if x < 0.0 { 0.5 * (lambda * x).exp() } else { 1.0 - 0.5 * (-lambda * x).exp() };
    let bins = 20;
    let width = (axis.hi - axis.lo) / bins as f64;
    let mut exact: Vec<f64> = (0..bins)
        .map(|k| laplace_cdf(axis.lo + (k + 1) as f64 * width) - laplace_cdf(axis.lo + k as f64 * width))
        .collect();
    let s: f64 = exact.iter().sum();
    exact.iter_mut().for_each(|m| *m /= s);
    let tv = discrete_tv(&grid.marginal_bins(1, bins), &exact).unwrap();
    assert!(tv <= 0.005, "{tv}");
}

#[test]
fn oracle_draws_pass_their_own_tv_check() {
    let data = common::toy(ModelKind::Logistic, 20);
    let grid = quadrature_oracle(&data, DEFAULT_RESOLUTION).unwrap();
    let mut rng = chain_stream(81, 0);
    let mut pairs: Vec<(f64, f64)> = (0..100_000).map(|_| grid.sample(&mut rng)).collect();
    let tv = tv_to_oracle(&store_from(&pairs), &grid, 20).unwrap();
    assert!(tv.iter().all(|t| *t <= 0.02), "{tv:?}");

    pairs.shuffle(&mut rng);
    assert_eq!(tv_to_oracle(&store_from(&pairs), &grid, 20).unwrap(), tv);

    let span = grid.axis(0).hi - grid.axis(0).lo;
    let shifted: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (a + 2.0 * span, b)).collect();
    let tv = tv_to_oracle(&store_from(&shifted), &grid, 20).unwrap();
    assert!(tv[0] > 0.999);

    assert!(tv_to_oracle(&SampleStore::new(1), &grid, 20).is_err());
    assert!(tv_to_oracle(&store_from(&pairs), &grid, 5).is_err());
}

#[test]
fn iid_draws_have_full_ess() {
    let mut rng = chain_stream(82, 0);
    let pairs: Vec<(f64, f64)> = (0..20_000)
        .map(|_| (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let report = ess_and_acf(&store_from(&pairs)).unwrap();
    for ess in report.ess {
        let ess = ess.unwrap();
        assert!((ess / 20_000.0 - 1.0).abs() < 0.1, "{ess}");
        assert!(ess <= 20_000.0);
    }
    for acf in report.acf {
        assert_eq!(acf.unwrap()[0], 1.0);
    }
}

#[test]
fn synthetic_probit_response_rate() {
    let s = generate_synthetic(ModelKind::Probit, 10_000, 2, 1.0, 1.0, 83).unwrap();
    assert!(s.truth.beta.iter().all(|b| *b == 0.0));
    let rate = s.dataset.y().iter().sum::<f64>() / 10_000.0;
    let expected = std_normal_cdf(s.truth.alpha);
    assert!((rate - expected).abs() <= 0.05 * expected, "{rate} vs {expected}");
}

#[test]
fn synthetic_hetero_noise_is_laplace() {
    let s = generate_synthetic(ModelKind::HeteroGaussian, 50_000, 1, 1.0, 1.0, 84).unwrap();
    let resid: Vec<f64> = s.dataset.y().iter().map(|y| y - s.truth.alpha).collect();
    // Laplace(scale 1): E|e| = 1, Var = 2
    let mean_abs = resid.iter().map(|r| r.abs()).sum::<f64>() / resid.len() as f64;
    let var = resid.iter().map(|r| r * r).sum::<f64>() / resid.len() as f64;
    assert!((mean_abs - 1.0).abs() < 0.02 && (var - 2.0).abs() < 0.06, "{mean_abs} {var}");
}
