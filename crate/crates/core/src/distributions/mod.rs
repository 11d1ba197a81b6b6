//! Exact samplers for the augmentation distributions and the divergence
//! utilities used by the bounds engine and the test-suite.

mod divergence;
mod inv_gaussian;
mod polya_gamma;
mod truncated_normal;

pub use divergence::{discrete_tv, inv_gaussian_kl, inv_gaussian_product_tv_bound};
pub use inv_gaussian::{sample_inv_gaussian, InvGaussianParams};
pub use polya_gamma::{polya_gamma_mean, sample_polya_gamma_1};
pub use truncated_normal::{
    sample_truncated_normal, Side, TruncatedNormalParams, TRUNCNORM_REJECTION_THRESHOLD,
};

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

/// Below this argument `log Φ` switches to the Mills-ratio continued fraction.
const LOG_CDF_TAIL_SWITCH: f64 = -5.0;

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function Φ.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `log Φ(x)`, accurate across the whole real line.
///
/// The lower tail is evaluated as `−x²/2 − ½log 2π + log R(−x)` with `R` the
/// Mills ratio, so no intermediate underflows for large negative arguments.
pub fn log_std_normal_cdf(x: f64) -> f64 {
    if x >= LOG_CDF_TAIL_SWITCH {
        if x > 0.0 {
            (-0.5 * erfc(x * FRAC_1_SQRT_2)).ln_1p()
        } else {
            (0.5 * erfc(-x * FRAC_1_SQRT_2)).ln()
        }
    } else {
        -0.5 * x * x - 0.5 * (2.0 * PI).ln() + mills_ratio(-x).ln()
    }
}

/// Mills ratio `R(t) = (1 − Φ(t)) / φ(t)` for `t ≥ 5` via its continued
/// fraction `1/(t + 1/(t + 2/(t + 3/(t + …))))`, modified Lentz evaluation.
fn mills_ratio(t: f64) -> f64 {
    debug_assert!(t >= -LOG_CDF_TAIL_SWITCH);
    const TINY: f64 = 1e-300;
    let mut f = t;
    let mut c = t;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64;
        d = t + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = t + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// Upper-tail quantile `Q⁻¹(q)` with `Q(x) = 1 − Φ(x)`.
pub(crate) fn std_normal_upper_quantile(q: f64) -> f64 {
    let x = SQRT_2 * erfc_inv(2.0 * q);
    // one Newton step against the accurate erfc
    let pdf = std_normal_pdf(x);
    if pdf > 0.0 {
        x + (0.5 * erfc(x * FRAC_1_SQRT_2) - q) / pdf
    } else {
        x
    }
}
