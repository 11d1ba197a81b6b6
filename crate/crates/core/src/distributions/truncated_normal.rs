use rand::Rng;
use rand_distr::{Exp1, Open01};

use super::{std_normal_cdf, std_normal_upper_quantile};

/// Kept-side probability below which the sampler leaves inversion for
/// exponential-proposal rejection.
pub const TRUNCNORM_REJECTION_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `[0, ∞)`
    NonNegative,
    /// `(−∞, 0)`
    Negative,
}

/// Unit-variance normal with the given mean, restricted to one half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormalParams {
    pub mean: f64,
    pub side: Side,
}

impl TruncatedNormalParams {
    pub fn new(mean: f64, side: Side) -> Self {
        Self { mean, side }
    }
}

/// Standard normal conditioned on `X ≥ a`.
fn lower_truncated_std_normal<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let kept = std_normal_cdf(-a);
    if kept >= TRUNCNORM_REJECTION_THRESHOLD {
        let u: f64 = rng.sample(Open01);
        return std_normal_upper_quantile(u * kept).max(a);
    }
    // exponential proposal with the optimal rate for the tail beyond a
    let rate = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        let e: f64 = rng.sample(Exp1);
        let x = a + e / rate;
        let u: f64 = rng.sample(Open01);
        let d = x - rate;
        if u.ln() <= -0.5 * d * d {
            return x;
        }
    }
}

/// Exact draw from `N(mean, 1)` truncated to `params.side`.
pub fn sample_truncated_normal<R: Rng + ?Sized>(params: &TruncatedNormalParams, rng: &mut R) -> f64 {
    match params.side {
        Side::NonNegative => {
            let x = lower_truncated_std_normal(-params.mean, rng);
            (params.mean + x).max(0.0)
        }
        Side::Negative => loop {
            // mirror: −W with W ~ N(−mean, 1) restricted to [0, ∞)
            let x = lower_truncated_std_normal(params.mean, rng);
            let w = -params.mean + x;
            if w > 0.0 {
                return -w;
            }
        },
    }
}
