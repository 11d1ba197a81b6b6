//! Non-asymptotic convergence certificates for the data augmentation chain.
//!
//! Everything here is closed-form arithmetic on a handful of data summaries:
//! `σ_max(X_λᵀX_λ)`, the smoothness certificate of the likelihood, `n`, `p`
//! and the hyperparameters. The isoperimetric constant carries an
//! unspecified universal factor `c1`; every number derived from it is
//! conditional on the configured value.

use std::f64::consts::LN_2;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{smoothness_certificate, Dataset, ModelKind, SmoothnessCertificate};

/// Default value of the universal constant in the isoperimetric lower bound.
pub const DEFAULT_C1: f64 = 1.0;
/// Overlap parameter ε of the close-coupling condition, the same for all models.
pub const COUPLING_EPSILON: f64 = 0.5;
/// `√5 − 1`, from the Mills-ratio lower bound behind the density-ratio constant.
const SQRT5_MINUS_1: f64 = 1.236_067_977_499_789_8;
/// Quotients this close (relatively) to an integer are not rounded up past it.
const CEIL_SNAP_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstants {
    pub delta: f64,
    pub epsilon: f64,
}

/// `(δ, ε)` from `σ_max(X_λᵀX_λ)` and the model's shape.
pub fn coupling_constants_from(kind: ModelKind, sigma_max_scaled: f64, n: usize, p: usize, gamma: f64) -> CouplingConstants {
    let dim_term = 1.0 / (32.0 * (p as f64).sqrt());
    let model_term = match kind {
        ModelKind::Probit => 1.0 / (2.0 * sigma_max_scaled.sqrt()),
        ModelKind::Logistic => 1.0 / sigma_max_scaled.sqrt(),
        ModelKind::HeteroGaussian => 1.0 / (32.0 * gamma * (n as f64 * sigma_max_scaled).sqrt()),
    };
    CouplingConstants {
        delta: model_term.min(dim_term),
        epsilon: COUPLING_EPSILON,
    }
}

pub fn coupling_constants(data: &Dataset) -> Result<CouplingConstants> {
    let sigma = data.sigma_max_scaled()?;
    Ok(coupling_constants_from(data.kind(), sigma, data.n(), data.p(), data.gamma()))
}

/// Density-ratio constant from a likelihood cap `log C` and a quadratic
/// majorization `(ℓ₀, L)`:
/// `log C + ℓ₀ + ½log((L + θ²)/θ²) + p·max{log(4/(√5−1)), log(2√L/(√5−1))}`.
pub fn density_ratio_general(log_c: f64, ell0: f64, l: f64, theta: f64, p: usize) -> f64 {
    let theta2 = theta * theta;
    let per_coord = (4.0 / SQRT5_MINUS_1).ln().max((2.0 * l.sqrt() / SQRT5_MINUS_1).ln());
    log_c + ell0 + 0.5 * ((l + theta2) / theta2).ln() + p as f64 * per_coord
}

/// Model-specific closed forms of the density-ratio constant; kept as an
/// independent cross-check of [`density_ratio_general`].
pub fn density_ratio_closed_form(
    kind: ModelKind,
    n: usize,
    p: usize,
    theta: f64,
    sigma_max_scaled: f64,
    gamma: f64,
    sum_abs_y: f64,
) -> f64 {
    let theta2 = theta * theta;
    let s = sigma_max_scaled;
    let base = (4.0 / SQRT5_MINUS_1).ln();
    let nf = n as f64;
    let pf = p as f64;
    match kind {
        ModelKind::Probit => {
            nf * LN_2 + 0.5 * ((s + theta2) / theta2).ln() + pf * base.max((2.0 * s.sqrt() / SQRT5_MINUS_1).ln())
        }
        ModelKind::Logistic => {
            nf * LN_2 + 0.5 * ((s / 4.0 + theta2) / theta2).ln() + pf * base.max((s.sqrt() / SQRT5_MINUS_1).ln())
        }
        ModelKind::HeteroGaussian => {
            gamma * (sum_abs_y + nf / 2.0)
                + 0.5 * ((gamma * s + theta2) / theta2).ln()
                + pf * base.max((2.0 * (gamma * s).sqrt() / SQRT5_MINUS_1).ln())
        }
    }
}

/// Density-ratio constant `D` for the dataset's model.
pub fn density_ratio_d(data: &Dataset) -> Result<f64> {
    let cert = smoothness_certificate(data)?;
    Ok(density_ratio_general(cert.log_c, cert.ell0, cert.l, data.theta(), data.p()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    pub iso_lower: f64,
    pub gap_lower: f64,
    pub rho: f64,
}

/// Isoperimetric lower bound, spectral-gap lower bound and `ρ = 1 − gap`.
pub fn contraction_rho(delta: f64, epsilon: f64, d: f64, theta: f64, c1: f64) -> Result<Contraction> {
    for (name, v) in [("delta", delta), ("epsilon", epsilon), ("c1", c1), ("theta", theta)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(format!("{name} must be positive, got {v}")));
        }
    }
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::param(format!("D must be non-negative, got {d}")));
    }
    let iso_lower = c1 * theta.min(1.0) / (d + 1.0);
    let coupling = 0.25 * delta * delta * iso_lower * iso_lower;
    let gap_lower = epsilon * epsilon / 32.0 * coupling.min(1.0);
    Ok(Contraction {
        iso_lower,
        gap_lower,
        rho: 1.0 - gap_lower,
    })
}

/// Gaussian initializer: `(α, λβ) ~ N(−V_L η, V_L)` with
/// `V_L = diag(1/(L + θ²), 1/(L + 1), …, 1/(L + 1))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarmStart {
    pub eta: Vec<f64>,
    pub l: f64,
    pub vl_diag: Vec<f64>,
}

impl WarmStart {
    pub fn new(eta: Vec<f64>, l: f64, theta: f64) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::param("eta must have length 1 + p"));
        }
        if !(l >= 0.0 && l.is_finite()) {
            return Err(Error::param(format!("L must be non-negative, got {l}")));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::param(format!("theta must be positive, got {theta}")));
        }
        let mut vl_diag = vec![1.0 / (l + 1.0); eta.len()];
        vl_diag[0] = 1.0 / (l + theta * theta);
        Ok(Self { eta, l, vl_diag })
    }

    fn from_certificate(cert: &SmoothnessCertificate, theta: f64) -> Result<Self> {
        Self::new(cert.eta.clone(), cert.l, theta)
    }

    /// Mean `−V_L η` in the scaled coordinates.
    pub fn scaled_mean(&self) -> Vec<f64> {
        self.eta.iter().zip(&self.vl_diag).map(|(e, v)| -e * v).collect()
    }

    /// `ηᵀ V_L η`.
    pub fn eta_quadratic(&self) -> f64 {
        self.eta.iter().zip(&self.vl_diag).map(|(e, v)| e * e * v).sum()
    }
}

/// The per-model `(η, L)` initializer.
pub fn warm_start(data: &Dataset) -> Result<WarmStart> {
    let cert = smoothness_certificate(data)?;
    WarmStart::from_certificate(&cert, data.theta())
}

/// One draw `(α, β)` from the warm start.
pub fn sample_warm_start<R: Rng + ?Sized>(ws: &WarmStart, lambda: f64, rng: &mut R) -> Result<(f64, Vec<f64>)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    let mut draw = ws.scaled_mean();
    for (x, v) in draw.iter_mut().zip(&ws.vl_diag) {
        let z: f64 = rng.sample(StandardNormal);
        *x += v.sqrt() * z;
    }
    let alpha = draw[0];
    let beta = draw[1..].iter().map(|b| b / lambda).collect();
    Ok((alpha, beta))
}

/// Upper bound on `log sup ω/π` for a Gaussian initializer built from a
/// quadratic majorization `(ℓ₀, η, L, log C)`:
/// `½log(L/θ² + 1) + (p/2)log(L + 1) − ½ηᵀV_Lη + log C + p log 2 + ℓ₀ + p/2`.
pub fn log_warmness_general(cert: &SmoothnessCertificate, theta: f64, p: usize) -> Result<f64> {
    let ws = WarmStart::from_certificate(cert, theta)?;
    let pf = p as f64;
    let l = cert.l;
    Ok(0.5 * (l / (theta * theta) + 1.0).ln() + 0.5 * pf * (l + 1.0).ln() - 0.5 * ws.eta_quadratic()
        + cert.log_c
        + pf * LN_2
        + cert.ell0
        + 0.5 * pf)
}

/// Probit closed form `½log(σ/θ² + 1) + (p/2)log(σ + 1) + p log 2 + n log 2 + p/2`,
/// which drops the `−½ηᵀV_Lη` term and is therefore never below the general bound.
pub fn log_warmness_probit_closed_form(n: usize, p: usize, theta: f64, sigma_max_scaled: f64) -> f64 {
    let (nf, pf, s) = (n as f64, p as f64, sigma_max_scaled);
    0.5 * (s / (theta * theta) + 1.0).ln() + 0.5 * pf * (s + 1.0).ln() + pf * LN_2 + nf * LN_2 + 0.5 * pf
}

pub fn log_warmness_bound(data: &Dataset) -> Result<f64> {
    let cert = smoothness_certificate(data)?;
    log_warmness_general(&cert, data.theta(), data.p())
}

fn ceil_budget(quotient: f64) -> u64 {
    let nearest = quotient.round();
    let steps = if (quotient - nearest).abs() <= CEIL_SNAP_REL * nearest.abs().max(1.0) {
        nearest
    } else {
        quotient.ceil()
    };
    // float-to-int casts saturate
    (steps as u64).max(1)
}

/// `ceil((log C̃ − log ε̄) / (−log ρ))`, at least 1.
pub fn mixing_time_budget(log_warmness: f64, rho: f64, eps_bar: f64) -> Result<u64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::param(format!("rho must lie in (0, 1), got {rho}")));
    }
    check_eps_bar(eps_bar)?;
    Ok(ceil_budget((log_warmness - eps_bar.ln()) / -rho.ln()))
}

/// Same budget computed from the gap, for gaps where `1 − gap` rounds to 1.
fn mixing_time_budget_from_gap(log_warmness: f64, gap: f64, eps_bar: f64) -> Result<u64> {
    check_eps_bar(eps_bar)?;
    Ok(ceil_budget((log_warmness - eps_bar.ln()) / -(-gap).ln_1p()))
}

fn check_eps_bar(eps_bar: f64) -> Result<()> {
    if !(eps_bar > 0.0 && eps_bar < 1.0) {
        return Err(Error::param(format!("eps_bar must lie in (0, 1), got {eps_bar}")));
    }
    Ok(())
}

/// All certificates for one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub sigma_max_scaled: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub d: f64,
    pub iso_lower: f64,
    pub gap_lower: f64,
    pub rho: f64,
    pub log_warmness: f64,
    pub t_mix: u64,
    pub c1: f64,
    pub m: f64,
    pub m_prime: f64,
    pub m_double_prime: f64,
}

pub fn full_report(data: &Dataset, c1: f64, eps_bar: f64) -> Result<BoundReport> {
    let sigma = data.sigma_max_scaled()?;
    let theta = data.theta();
    let coupling = coupling_constants_from(data.kind(), sigma, data.n(), data.p(), data.gamma());
    let cert = smoothness_certificate(data)?;
    let d = density_ratio_general(cert.log_c, cert.ell0, cert.l, theta, data.p());
    let contraction = contraction_rho(coupling.delta, coupling.epsilon, d, theta, c1)?;
    let log_warmness = log_warmness_general(&cert, theta, data.p())?;
    // ρ itself rounds to 1 once the gap drops below machine epsilon
    let t_mix = if contraction.rho < 1.0 {
        mixing_time_budget(log_warmness, contraction.rho, eps_bar)?
    } else {
        mixing_time_budget_from_gap(log_warmness, contraction.gap_lower, eps_bar)?
    };
    let theta2 = theta * theta;
    Ok(BoundReport {
        sigma_max_scaled: sigma,
        delta: coupling.delta,
        epsilon: coupling.epsilon,
        d,
        iso_lower: contraction.iso_lower,
        gap_lower: contraction.gap_lower,
        rho: contraction.rho,
        log_warmness,
        t_mix,
        c1,
        m: (1.0 / theta2 + 1.0) * sigma,
        m_prime: sigma + 1.0,
        m_double_prime: sigma / theta2 + 1.0,
    })
}
