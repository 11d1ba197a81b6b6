//! Exact `PG(1, c)` draws by Devroye-style alternating-series rejection.
//!
//! `PG(1, c) = J*(1, c/2) / 4`. The proposal for `J*(1, z)` is a two-piece
//! mixture: a truncated inverse Gaussian on `(0, t]` and a shifted
//! exponential on `(t, ∞)`. Acceptance is decided exactly by the alternating
//! series representation of the Jacobi density.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, Open01, StandardNormal};

use super::log_std_normal_cdf;

/// Switch point between the two proposal pieces.
const TRUNC: f64 = 0.64;

/// `E[PG(1, c)] = tanh(c/2) / (2c)`, with the `c → 0` limit `1/4`.
pub fn polya_gamma_mean(c: f64) -> f64 {
    let c = c.abs();
    if c < 1e-4 {
        // tanh(x)/(4x) = 1/4 − x²/12 + …, x = c/2
        0.25 - c * c / 48.0
    } else {
        (0.5 * c).tanh() / (2.0 * c)
    }
}

/// `n`-th coefficient of the alternating series for the `J*(1)` density at `x`.
fn series_coef(n: u32, x: f64) -> f64 {
    let k = n as f64 + 0.5;
    if x > TRUNC {
        PI * k * (-0.5 * k * k * PI * PI * x).exp()
    } else {
        PI * k * (2.0 / (PI * x)).powf(1.5) * (-2.0 * k * k / x).exp()
    }
}

/// `P(X ≤ t)` for `X ~ InvGaussian(1/z, 1)`; `z = 0` is the Lévy limit.
fn inv_gaussian_cdf_unit_shape(t: f64, z: f64) -> f64 {
    let root_t = t.sqrt();
    let b = (t * z - 1.0) / root_t;
    let a = -(t * z + 1.0) / root_t;
    log_std_normal_cdf(b).exp() + (2.0 * z + log_std_normal_cdf(a)).exp()
}

/// `InvGaussian(1/z, 1)` truncated to `(0, t]`.
fn truncated_inv_gaussian<R: Rng + ?Sized>(z: f64, t: f64, rng: &mut R) -> f64 {
    if z < 1.0 / t {
        // mean beyond the truncation point: Lévy proposal with exp(−z²x/2) acceptance
        loop {
            let x = loop {
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                if e1 * e1 <= 2.0 * e2 / t {
                    let s = 1.0 + e1 * t;
                    break t / (s * s);
                }
            };
            let u: f64 = rng.sample(Open01);
            if u.ln() <= -0.5 * z * z * x {
                return x;
            }
        }
    }
    let mu = 1.0 / z;
    loop {
        let v: f64 = rng.sample(StandardNormal);
        let w = 0.5 * mu * v * v;
        let root = mu / (1.0 + w + (w * (w + 2.0)).sqrt());
        let u: f64 = rng.sample(Open01);
        let x = if u <= mu / (mu + root) { root } else { mu * mu / root };
        if x <= t {
            return x;
        }
    }
}

/// Exact draw from `PG(1, c)`.
pub fn sample_polya_gamma_1<R: Rng + ?Sized>(c: f64, rng: &mut R) -> f64 {
    let z = 0.5 * c.abs();
    let k = PI * PI / 8.0 + 0.5 * z * z;
    let p = PI / (2.0 * k) * (-k * TRUNC).exp();
    let q = 2.0 * (-z).exp() * inv_gaussian_cdf_unit_shape(TRUNC, z);
    let mix = p / (p + q);
    loop {
        let u: f64 = rng.sample(Open01);
        let x = if u < mix {
            let e: f64 = rng.sample(Exp1);
            TRUNC + e / k
        } else {
            truncated_inv_gaussian(z, TRUNC, rng)
        };
        let mut s = series_coef(0, x);
        let y = rng.sample::<f64, _>(Open01) * s;
        let mut n = 0u32;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= series_coef(n, x);
                if y <= s {
                    return 0.25 * x;
                }
            } else {
                s += series_coef(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mean_formula_limits() {
        // 1/4 = Σ_k 1/(2π²(k − 1/2)²)
        let series: f64 = (1..200_000)
            .map(|k| 1.0 / (2.0 * PI * PI * (k as f64 - 0.5).powi(2)))
            .sum();
        assert!((polya_gamma_mean(0.0) - series).abs() < 1e-5);
        assert!((polya_gamma_mean(1.0) - 0.231_058_578_630_004_9).abs() < 1e-12);
        assert!((polya_gamma_mean(5.0) - 0.098_661_429_815_143_04).abs() < 1e-12);
        assert!((polya_gamma_mean(1e-5) - polya_gamma_mean(2e-4)).abs() < 1e-8);
    }

    #[test]
    fn unit_shape_cdf_levy_limit() {
        // Lévy(1) CDF at t is 2Q(1/√t)
        let t = TRUNC;
        let expected = 2.0 * (1.0 - super::super::std_normal_cdf(1.0 / t.sqrt()));
        assert!((inv_gaussian_cdf_unit_shape(t, 0.0) - expected).abs() < 1e-14);
        assert!(inv_gaussian_cdf_unit_shape(t, 800.0).is_finite());
    }

    #[test]
    fn draws_positive_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &c in &[0.0, 0.1, 1.0, 5.0, 50.0, 1e3] {
            for _ in 0..2000 {
                let x = sample_polya_gamma_1(c, &mut rng);
                assert!(x > 0.0 && x.is_finite());
            }
        }
        let a = sample_polya_gamma_1(2.0, &mut ChaCha8Rng::seed_from_u64(99));
        let b = sample_polya_gamma_1(2.0, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
    }

    #[test]
    fn variance_matches_closed_form() {
        // Var PG(1,c) = (sinh(c) − c) / (4 c³ cosh²(c/2))
        let c: f64 = 2.0;
        let var = (c.sinh() - c) / (4.0 * c.powi(3) * (0.5 * c).cosh().powi(2));
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_polya_gamma_1(c, &mut rng)).collect();
        let m = draws.iter().sum::<f64>() / n as f64;
        let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((m / polya_gamma_mean(c) - 1.0).abs() < 0.01);
        assert!((v / var - 1.0).abs() < 0.03, "{v} vs {var}");
    }
}
