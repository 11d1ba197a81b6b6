//! Distributional checks of the data augmentation chain against the
//! quadrature oracle.

mod common;

use common::{axis_histogram, one_step_stationarity, toy};
use dalasso::diagnostics::{ess_and_acf, tv_to_oracle};
use dalasso::distributions::discrete_tv;
use dalasso::oracle::{quadrature_oracle, Axis, DEFAULT_RESOLUTION};
use dalasso::sampler::{chain_stream, run, update_xi, InitialDistribution, SamplerConfig};
use dalasso::synthetic::generate_synthetic;
use dalasso::ModelKind;

#[test]
fn xi_update_mean_and_levy_path() {
    let mut rng = chain_stream(61, 0);
    let draws: Vec<f64> = (0..1_000_000).map(|_| update_xi(&[0.5, 0.0], 2.0, &mut rng).unwrap()[0]).collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    assert!((mean / 4.0 - 1.0).abs() < 0.01, "{mean}");

    let mut rng = chain_stream(62, 0);
    let mut scaled: Vec<f64> = (0..1_000_000).map(|_| 1.0 / update_xi(&[0.0], 1.0, &mut rng).unwrap()[0]).collect();
    assert!(common::ks_statistic(&mut scaled, common::chi2_1_cdf) < 0.002);

    let a = update_xi(&[0.1, -2.0, 0.0], 1.5, &mut chain_stream(7, 3)).unwrap();
    let b = update_xi(&[0.1, -2.0, 0.0], 1.5, &mut chain_stream(7, 3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn one_step_preserves_oracle_marginals() {
    for kind in ModelKind::ALL {
        let tv = one_step_stationarity(&toy(kind, 20), 10_000, 20, 63);
        assert!(tv[0] <= 0.05 && tv[1] <= 0.05, "{kind}: {tv:?}");
    }
}

#[test]
fn probit_posterior_mean_within_monte_carlo_error() {
    let data = toy(ModelKind::Probit, 20);
    let grid = quadrature_oracle(&data, DEFAULT_RESOLUTION).unwrap();
    let cfg = SamplerConfig { iterations: 40_000, burn_in: 1_000, thin: 1, chains: 2, seed: 64 };
    let out = run(&data, &cfg, InitialDistribution::WarmStart).unwrap();
    let ess = ess_and_acf(&out.store).unwrap().ess;
    for (k, ess_k) in ess.iter().enumerate() {
        let xs = out.store.pooled(k);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let mcse = (var / ess_k.unwrap()).sqrt();
        let target = grid.mean(k);
        assert!((mean - target).abs() <= 3.0 * mcse, "coord {k}: {mean} vs {target} (mcse {mcse})");
    }
}

#[test]
fn hetero_long_run_matches_oracle() {
    let data = toy(ModelKind::HeteroGaussian, 10);
    let grid = quadrature_oracle(&data, DEFAULT_RESOLUTION).unwrap();
    let cfg = SamplerConfig { iterations: 200_000, burn_in: 1_000, thin: 1, chains: 1, seed: 65 };
    let out = run(&data, &cfg, InitialDistribution::WarmStart).unwrap();
    let tv = tv_to_oracle(&out.store, &grid, 20).unwrap();
    assert!(tv.iter().all(|t| *t <= 0.05), "{tv:?}");
}

#[test]
fn origin_start_reaches_the_same_posterior() {
    let data = toy(ModelKind::Logistic, 20);
    let grid = quadrature_oracle(&data, DEFAULT_RESOLUTION).unwrap();
    let cfg = SamplerConfig { iterations: 100_000, burn_in: 1_000, thin: 1, chains: 1, seed: 66 };
    let out = run(&data, &cfg, InitialDistribution::Origin).unwrap();
    let tv = tv_to_oracle(&out.store, &grid, 20).unwrap();
    assert!(tv.iter().all(|t| *t <= 0.05), "{tv:?}");
}

#[test]
fn permuting_covariates_commutes_with_sampling() {
    for kind in ModelKind::ALL {
        let data = generate_synthetic(kind, 20, 3, 1.0, 0.0, 67).unwrap().dataset;
        let perm = [2usize, 0, 1];
        let permuted = data.permute_covariates(&perm).unwrap();
        let cfg = SamplerConfig { iterations: 50_000, burn_in: 1_000, thin: 1, chains: 4, seed: 68 };
        let a = run(&data, &cfg, InitialDistribution::WarmStart).unwrap().store;
        let b = run(&permuted, &cfg, InitialDistribution::WarmStart).unwrap().store;
        for (k, &j) in perm.iter().enumerate() {
            // permuted slope k is original slope perm[k]
            let xa = a.pooled(j + 1);
            let xb = b.pooled(k + 1);
            let lo = xa.iter().chain(&xb).cloned().fold(f64::INFINITY, f64::min);
            let hi = xa.iter().chain(&xb).cloned().fold(f64::NEG_INFINITY, f64::max);
            let axis = Axis { lo, hi, nodes: 2 };
            let tv = discrete_tv(&axis_histogram(&xa, &axis, 20), &axis_histogram(&xb, &axis, 20)).unwrap();
            assert!(tv <= 0.05, "{kind} slope {j}: {tv}");
        }
    }
}
