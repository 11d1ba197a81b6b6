//! Probit, logistic and heteroskedastic-Gaussian (Laplace error) likelihoods
//! with their latent-variable augmentations.
//!
//! Each model provides the negative log-likelihood `ℓ(α, β)`, an exact draw
//! of the latent vector given `(α, β)`, the Gaussian full conditional of
//! `(α, β)` given the latents and the local scales, and a quadratic
//! majorization certificate for `ℓ` in the scaled coordinates `(α, λβ)`.

use std::f64::consts::{LN_2, PI};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    log_std_normal_cdf, sample_inv_gaussian, sample_polya_gamma_1, sample_truncated_normal,
    InvGaussianParams, Side, TruncatedNormalParams,
};
use crate::error::{Error, Result};
use crate::linalg::{build_scaled_design, sigma_max, DesignMatrix, PrecisionGaussian, ScaledDesign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Probit,
    Logistic,
    HeteroGaussian,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Probit, ModelKind::Logistic, ModelKind::HeteroGaussian];

    pub fn is_binary(self) -> bool {
        !matches!(self, ModelKind::HeteroGaussian)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Probit => "probit",
            ModelKind::Logistic => "logistic",
            ModelKind::HeteroGaussian => "hetero_gaussian",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probit" => Ok(ModelKind::Probit),
            "logistic" => Ok(ModelKind::Logistic),
            "hetero_gaussian" | "hetero" => Ok(ModelKind::HeteroGaussian),
            other => Err(Error::param(format!(
                "unknown model kind '{other}' (expected probit, logistic or hetero_gaussian)"
            ))),
        }
    }
}

/// Prior hyperparameters: lasso penalty λ, ridge precision θ on the
/// intercept, and the Laplace-error rate γ of the heteroskedastic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub lambda: f64,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl HyperParams {
    pub fn new(lambda: f64, theta: f64, gamma: Option<f64>) -> Result<Self> {
        let h = Self { lambda, theta, gamma };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::param(format!("theta must be positive, got {}", self.theta)));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::param(format!("gamma must be positive, got {g}")));
            }
        }
        Ok(())
    }
}

/// Observed responses, design and prior for one of the three models.
#[derive(Debug, Clone)]
pub struct Dataset {
    kind: ModelKind,
    y: Vec<f64>,
    x: DesignMatrix,
    hyper: HyperParams,
    gram: DMatrix<f64>,
}

impl Dataset {
    pub fn new(kind: ModelKind, y: Vec<f64>, x: DesignMatrix, hyper: HyperParams) -> Result<Self> {
        hyper.validate()?;
        if y.len() != x.n() {
            return Err(Error::param(format!(
                "response has length {}, design has {} rows",
                y.len(),
                x.n()
            )));
        }
        if kind.is_binary() {
            if let Some(i) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::param(format!(
                    "{kind} responses must be 0 or 1, y[{i}] = {}",
                    y[i]
                )));
            }
        } else {
            if hyper.gamma.is_none() {
                return Err(Error::param("hetero_gaussian model requires gamma"));
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("responses must be finite"));
            }
        }
        let gram = x.gram();
        Ok(Self { kind, y, x, hyper, gram })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.x
    }

    pub fn hyper(&self) -> &HyperParams {
        &self.hyper
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn p(&self) -> usize {
        self.x.p()
    }

    pub fn lambda(&self) -> f64 {
        self.hyper.lambda
    }

    pub fn theta(&self) -> f64 {
        self.hyper.theta
    }

    /// γ; only meaningful for the heteroskedastic model, where it is guaranteed present.
    pub fn gamma(&self) -> f64 {
        self.hyper.gamma.unwrap_or(f64::NAN)
    }

    pub fn scaled_design(&self) -> ScaledDesign {
        build_scaled_design(&self.x, self.hyper.lambda).expect("lambda validated at construction")
    }

    /// `σ_max(X_λᵀ X_λ)`.
    pub fn sigma_max_scaled(&self) -> Result<f64> {
        sigma_max(&self.scaled_design().gram())
    }

    /// Same data with covariate column `j` taken from old column `perm[j]`.
    pub fn permute_covariates(&self, perm: &[usize]) -> Result<Self> {
        Self::new(self.kind, self.y.clone(), self.x.permute_covariates(perm)?, self.hyper)
    }

    fn check_beta(&self, beta: &[f64]) -> Result<()> {
        if beta.len() != self.p() {
            return Err(Error::param(format!(
                "beta has length {}, dataset has p = {}",
                beta.len(),
                self.p()
            )));
        }
        Ok(())
    }

    /// Unnormalized log posterior `−ℓ(α, β) − θ²α²/2 − λ‖β‖₁`.
    pub fn log_posterior_unnormalized(&self, alpha: f64, beta: &[f64]) -> Result<f64> {
        let nll = neg_log_likelihood(self, alpha, beta)?;
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        Ok(-nll - 0.5 * self.theta().powi(2) * alpha * alpha - self.lambda() * l1)
    }
}

/// Latent draws `z`: signed normals (probit), Pólya-Gamma variables
/// (logistic) or observation precisions (heteroskedastic).
#[derive(Debug, Clone, PartialEq)]
pub struct LatentVector(pub Vec<f64>);

impl LatentVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Constants of `ℓ(α, β) ≤ ℓ₀ + ηᵀ(α, λβ) + (L/2)(α² + λ²‖β‖²)` together
/// with `log C`, where `C` bounds the likelihood from above.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessCertificate {
    pub ell0: f64,
    pub eta: Vec<f64>,
    pub l: f64,
    pub log_c: f64,
}

impl SmoothnessCertificate {
    /// Right-hand side of the majorization at `(α, β)`.
    pub fn majorant(&self, alpha: f64, beta: &[f64], lambda: f64) -> f64 {
        let mut linear = self.eta[0] * alpha;
        let mut sq = alpha * alpha;
        for (j, b) in beta.iter().enumerate() {
            let scaled = lambda * b;
            linear += self.eta[j + 1] * scaled;
            sq += scaled * scaled;
        }
        self.ell0 + linear + 0.5 * self.l * sq
    }
}

/// `log(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `ℓ(α, β) = −log f(y | α, β)`.
pub fn neg_log_likelihood(data: &Dataset, alpha: f64, beta: &[f64]) -> Result<f64> {
    data.check_beta(beta)?;
    let eta = data.x.linear_predictor(alpha, beta);
    let y = &data.y;
    let value = match data.kind {
        ModelKind::Probit => -eta
            .iter()
            .zip(y)
            .map(|(&e, &yi)| if yi == 1.0 { log_std_normal_cdf(e) } else { log_std_normal_cdf(-e) })
            .sum::<f64>(),
        ModelKind::Logistic => eta.iter().zip(y).map(|(&e, &yi)| softplus(e) - yi * e).sum(),
        ModelKind::HeteroGaussian => {
            let gamma = data.gamma();
            let abs_resid: f64 = eta.iter().zip(y).map(|(&e, &yi)| (yi - e).abs()).sum();
            -(data.n() as f64) * (0.5 * gamma).ln() + gamma * abs_resid
        }
    };
    Ok(value)
}

/// Draws `z ~ g(· | α, β, y)`, one independent coordinate per observation.
pub fn draw_latent<R: Rng + ?Sized>(
    data: &Dataset,
    alpha: f64,
    beta: &[f64],
    rng: &mut R,
) -> Result<LatentVector> {
    data.check_beta(beta)?;
    let eta = data.x.linear_predictor(alpha, beta);
    let z = match data.kind {
        ModelKind::Probit => eta
            .iter()
            .zip(&data.y)
            .map(|(&e, &yi)| {
                let side = if yi == 1.0 { Side::NonNegative } else { Side::Negative };
                sample_truncated_normal(&TruncatedNormalParams::new(e, side), rng)
            })
            .collect(),
        ModelKind::Logistic => eta.iter().map(|&e| sample_polya_gamma_1(e.abs(), rng)).collect(),
        ModelKind::HeteroGaussian => {
            let gamma = data.gamma();
            eta.iter()
                .zip(&data.y)
                .map(|(&e, &yi)| {
                    // zero residual maps onto the Lévy limit
                    let params = InvGaussianParams::from_tilt(yi - e, gamma)?;
                    Ok(sample_inv_gaussian(&params, rng))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(LatentVector(z))
}

/// Full conditional of `(α, β)` given latents `z` and `ξ = 1/τ`:
/// precision `XᵀΛX + D` with `D = diag(θ², ξ₁, …, ξ_p)`.
pub fn conditional_gaussian(data: &Dataset, z: &LatentVector, xi: &[f64]) -> Result<PrecisionGaussian> {
    let (n, p) = (data.n(), data.p());
    if xi.len() != p {
        return Err(Error::param(format!("xi has length {}, expected {p}", xi.len())));
    }
    if let Some(j) = xi.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::param(format!("xi[{j}] = {} must be positive and finite", xi[j])));
    }
    let z = z.as_slice();
    if z.len() != n {
        return Err(Error::param(format!("latent vector has length {}, expected {n}", z.len())));
    }
    if !data.kind.is_binary() || data.kind == ModelKind::Logistic {
        if let Some(i) = z.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::param(format!("latent z[{i}] = {} must be positive", z[i])));
        }
    }
    let x = data.x.matrix();
    let dim = p + 1;
    let (mut precision, rhs) = match data.kind {
        ModelKind::Probit => (data.gram.clone(), x.tr_mul(&DVector::from_column_slice(z))),
        ModelKind::Logistic | ModelKind::HeteroGaussian => {
            let mut weighted = DMatrix::<f64>::zeros(dim, dim);
            let mut rhs = DVector::<f64>::zeros(dim);
            for (i, &w) in z.iter().enumerate() {
                let row = x.row(i);
                let target = if data.kind == ModelKind::Logistic {
                    data.y[i] - 0.5
                } else {
                    w * data.y[i]
                };
                for a in 0..dim {
                    let wa = w * row[a];
                    for b in 0..=a {
                        weighted[(a, b)] += wa * row[b];
                    }
                    rhs[a] += target * row[a];
                }
            }
            for a in 0..dim {
                for b in 0..a {
                    weighted[(b, a)] = weighted[(a, b)];
                }
            }
            (weighted, rhs)
        }
    };
    precision[(0, 0)] += data.theta().powi(2);
    for j in 0..p {
        precision[(j + 1, j + 1)] += xi[j];
    }
    PrecisionGaussian::new(precision, rhs)
}

/// Per-model `(ℓ₀, η, L, log C)` of the quadratic majorization of `ℓ`.
pub fn smoothness_certificate(data: &Dataset) -> Result<SmoothnessCertificate> {
    let (n, p) = (data.n(), data.p());
    let lambda = data.lambda();
    let sigma = data.sigma_max_scaled()?;
    // Σ w_i (1, x_i/λ)
    let score = |weight: &dyn Fn(f64) -> f64| -> Vec<f64> {
        let mut eta = vec![0.0; p + 1];
        for (i, &yi) in data.y.iter().enumerate() {
            let w = weight(yi);
            eta[0] += w;
            for j in 0..p {
                eta[j + 1] += w * data.x.covariate(i, j) / lambda;
            }
        }
        eta
    };
    let cert = match data.kind {
        ModelKind::Probit => {
            let k = (2.0 / PI).sqrt();
            SmoothnessCertificate {
                ell0: n as f64 * LN_2,
                eta: score(&|yi| -k * (2.0 * yi - 1.0)),
                l: sigma,
                log_c: 0.0,
            }
        }
        ModelKind::Logistic => SmoothnessCertificate {
            ell0: n as f64 * LN_2,
            eta: score(&|yi| -(2.0 * yi - 1.0) / 2.0),
            l: sigma / 4.0,
            log_c: 0.0,
        },
        ModelKind::HeteroGaussian => {
            let gamma = data.gamma();
            let abs_y: f64 = data.y.iter().map(|v| v.abs()).sum();
            let log_half_gamma = (0.5 * gamma).ln();
            SmoothnessCertificate {
                ell0: -(n as f64) * log_half_gamma + gamma * (abs_y + 0.5 * n as f64),
                eta: vec![0.0; p + 1],
                l: gamma * sigma,
                log_c: n as f64 * log_half_gamma,
            }
        }
    };
    Ok(cert)
}
