use crate::error::{Error, Result};

const HISTOGRAM_SUM_TOL: f64 = 1e-9;

/// `KL(h(·, b) ‖ h(·, b'))` between the inverse Gaussian laws
/// `InvGaussian(c/|b|, c²)` and `InvGaussian(c/|b'|, c²)`.
///
/// Requires `|b| ≥ |b'|`; the closed form is
/// `c(|b| − |b'|) − c(b² − b'²)/(2|b|)`.
pub fn inv_gaussian_kl(b: f64, b_prime: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param(format!("c must be positive, got {c}")));
    }
    if !(b.is_finite() && b_prime.is_finite()) {
        return Err(Error::param("tilts must be finite"));
    }
    let (ab, abp) = (b.abs(), b_prime.abs());
    if ab < abp {
        return Err(Error::param(format!(
            "KL needs |b| >= |b'| (got |b| = {ab}, |b'| = {abp}); swap the arguments"
        )));
    }
    if ab == abp {
        return Ok(0.0);
    }
    let kl = c * (ab - abp) - c * (b * b - b_prime * b_prime) / (2.0 * ab);
    Ok(kl.max(0.0))
}

/// Upper bound `√(2c) q^{1/4} ‖s1 − s2‖₂^{1/2}` on the total variation
/// between the product laws `⊗_j InvGaussian(c/|s_j|, c²)`.
pub fn inv_gaussian_product_tv_bound(s1: &[f64], s2: &[f64], c: f64) -> Result<f64> {
    if s1.len() != s2.len() {
        return Err(Error::param(format!(
            "tilt vectors have lengths {} and {}",
            s1.len(),
            s2.len()
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param(format!("c must be positive, got {c}")));
    }
    let q = s1.len() as f64;
    let dist = s1
        .iter()
        .zip(s2)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok((2.0 * c).sqrt() * q.powf(0.25) * dist.sqrt())
}

fn check_histogram(h: &[f64], name: &str) -> Result<()> {
    if h.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::param(format!("histogram {name} has negative or non-finite mass")));
    }
    let total: f64 = h.iter().sum();
    if (total - 1.0).abs() > HISTOGRAM_SUM_TOL {
        return Err(Error::param(format!("histogram {name} sums to {total}, expected 1")));
    }
    Ok(())
}

/// Total variation `½ Σ |p1_k − p2_k|` between two histograms on the same bins.
pub fn discrete_tv(p1: &[f64], p2: &[f64]) -> Result<f64> {
    if p1.len() != p2.len() {
        return Err(Error::param(format!(
            "histograms have {} and {} bins",
            p1.len(),
            p2.len()
        )));
    }
    check_histogram(p1, "p1")?;
    check_histogram(p2, "p2")?;
    let tv = 0.5 * p1.iter().zip(p2).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(tv.clamp(0.0, 1.0))
}
