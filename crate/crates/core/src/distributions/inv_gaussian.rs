use rand::Rng;
use rand_distr::{Open01, StandardNormal};

use crate::error::{Error, Result};

/// `InvGaussian(mean, shape)`; an infinite mean selects the Lévy limit with
/// density `∝ u^{-3/2} exp(−shape / (2u))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvGaussianParams {
    mean: f64,
    shape: f64,
}

impl InvGaussianParams {
    pub fn new(mean: f64, shape: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::param(format!("inverse Gaussian shape must be positive, got {shape}")));
        }
        if !(mean > 0.0) {
            return Err(Error::param(format!("inverse Gaussian mean must be positive, got {mean}")));
        }
        Ok(Self { mean, shape })
    }

    /// The degenerate `mean = ∞` member.
    pub fn levy(shape: f64) -> Result<Self> {
        Self::new(f64::INFINITY, shape)
    }

    /// `InvGaussian(c/|b|, c²)`, the parameterization of the density
    /// `h(u; b) ∝ u^{-3/2} exp(−b²u/2 − c²/(2u))`. `b = 0` gives the Lévy law.
    pub fn from_tilt(b: f64, c: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::param(format!("tilt must be finite, got {b}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param(format!("scale c must be positive, got {c}")));
        }
        let mean = if b == 0.0 { f64::INFINITY } else { c / b.abs() };
        Self::new(mean, c * c)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn is_levy(&self) -> bool {
        self.mean.is_infinite()
    }
}

/// Exact inverse Gaussian draw.
///
/// Finite means use the transformation-with-multiple-roots method; the Lévy
/// limit returns `shape / Z²`.
pub fn sample_inv_gaussian<R: Rng + ?Sized>(params: &InvGaussianParams, rng: &mut R) -> f64 {
    let shape = params.shape;
    if params.is_levy() {
        loop {
            let z: f64 = rng.sample(StandardNormal);
            let draw = shape / (z * z);
            if draw.is_finite() {
                return draw;
            }
        }
    }
    let mu = params.mean;
    let v: f64 = rng.sample(StandardNormal);
    let w = mu * v * v / (2.0 * shape);
    // smaller root μ(1 + w − √(w² + 2w)), written without cancellation
    let root = mu / (1.0 + w + (w * (w + 2.0)).sqrt());
    let u: f64 = rng.sample(Open01);
    let draw = if u <= mu / (mu + root) { root } else { mu * mu / root };
    draw.max(f64::MIN_POSITIVE)
}
