//! Dense linear algebra for the `(1 + p)`-dimensional Gaussian block update:
//! design matrices with an intercept column, the covariate-rescaled design,
//! top-eigenvalue estimation and precision-parameterized Gaussian draws.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Relative tolerance used for symmetry checks and power-iteration convergence.
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const POWER_ITERATION_TOL: f64 = 1e-10;
const POWER_ITERATION_MAX_ITERS: usize = 100_000;
const RESTART_SEED: u64 = 0x005e_ed0f_5a11;

/// An `n × (1 + p)` design whose first column is the intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    matrix: DMatrix<f64>,
}

impl DesignMatrix {
    /// Builds the design from an `n × p` covariate matrix by prepending a column of ones.
    pub fn from_covariates(covariates: &DMatrix<f64>) -> Result<Self> {
        let (n, p) = covariates.shape();
        if n == 0 || p == 0 {
            return Err(Error::param(format!(
                "design needs n >= 1 and p >= 1, got n = {n}, p = {p}"
            )));
        }
        if covariates.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("covariates must be finite"));
        }
        let matrix = DMatrix::from_fn(n, p + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                covariates[(i, j - 1)]
            }
        });
        Ok(Self { matrix })
    }

    /// Builds the design from covariate rows `x_i` (each of length `p`).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::param(format!(
                "covariate row {bad} has length {}, expected {p}",
                rows[bad].len()
            )));
        }
        let covariates = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
        Self::from_covariates(&covariates)
    }

    /// Wraps a full design matrix, checking that column 0 is exactly one.
    pub fn with_intercept(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() < 2 {
            return Err(Error::param("design needs n >= 1 and p >= 1"));
        }
        if matrix.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::param("first design column must be the intercept (all ones)"));
        }
        Ok(Self { matrix })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn p(&self) -> usize {
        self.matrix.ncols() - 1
    }

    /// Full `n × (1 + p)` matrix including the intercept column.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Covariate `x_{i,j}` for `j` in `0..p`.
    pub fn covariate(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j + 1)]
    }

    /// Linear predictor `α + x_iᵀβ` for every row.
    pub fn linear_predictor(&self, alpha: f64, beta: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|i| {
                let mut eta = alpha;
                for (j, b) in beta.iter().enumerate() {
                    eta += self.matrix[(i, j + 1)] * b;
                }
                eta
            })
            .collect()
    }

    /// `XᵀX`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.matrix.tr_mul(&self.matrix)
    }

    /// Copy with covariate columns permuted: new column `j` is old column `perm[j]`.
    pub fn permute_covariates(&self, perm: &[usize]) -> Result<Self> {
        let p = self.p();
        let mut seen = vec![false; p];
        if perm.len() != p || perm.iter().any(|&j| j >= p || std::mem::replace(&mut seen[j], true)) {
            return Err(Error::param("covariate permutation is not a permutation of 0..p"));
        }
        let matrix = DMatrix::from_fn(self.n(), p + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                self.matrix[(i, perm[j - 1] + 1)]
            }
        });
        Ok(Self { matrix })
    }
}

/// The design with covariates divided by λ, i.e. row `i` is `(1, x_iᵀ/λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDesign {
    matrix: DMatrix<f64>,
    lambda: f64,
}

impl ScaledDesign {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gram(&self) -> DMatrix<f64> {
        self.matrix.tr_mul(&self.matrix)
    }
}

pub fn build_scaled_design(x: &DesignMatrix, lambda: f64) -> Result<ScaledDesign> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be positive and finite, got {lambda}")));
    }
    let mut matrix = x.matrix.clone();
    for mut col in matrix.column_iter_mut().skip(1) {
        col.iter_mut().for_each(|v| *v /= lambda);
    }
    Ok(ScaledDesign { matrix, lambda })
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::param(format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    let scale = m.amax();
    for i in 0..m.nrows() {
        for j in 0..i {
            let gap = (m[(i, j)] - m[(j, i)]).abs();
            if !(gap <= SYMMETRY_TOL * scale) {
                return Err(Error::param(format!(
                    "matrix is not symmetric: entries ({i},{j}) and ({j},{i}) differ by {gap:e}"
                )));
            }
        }
    }
    Ok(())
}

struct PowerRun {
    estimate: f64,
    converged: bool,
}

fn power_iterate(m: &DMatrix<f64>, start: DVector<f64>) -> PowerRun {
    let scale = m.amax();
    let mut v = start.normalize();
    let mut prev = f64::NAN;
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATION_MAX_ITERS {
        let w = m * &v;
        estimate = v.dot(&w) / v.norm_squared();
        if (estimate - prev).abs() <= POWER_ITERATION_TOL * estimate.abs() {
            return PowerRun { estimate, converged: true };
        }
        let norm = w.norm();
        // Start vector (numerically) orthogonal to the range of `m`.
        if !(norm > f64::EPSILON * scale) {
            return PowerRun { estimate, converged: false };
        }
        v = w / norm;
        prev = estimate;
    }
    PowerRun { estimate, converged: false }
}

/// Largest eigenvalue of a symmetric positive semi-definite matrix.
///
/// Power iteration from the normalized all-ones vector, confirmed by a second
/// run from a fixed pseudo-random start so that an all-ones start lying in a
/// lower eigenspace cannot trap the estimate.
pub fn sigma_max(m: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(m)?;
    let dim = m.nrows();
    if dim == 0 || m.amax() == 0.0 {
        return Ok(0.0);
    }
    let sym = (m + m.transpose()) * 0.5;
    let first = power_iterate(&sym, DVector::from_element(dim, 1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    let restart_start = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let restart = power_iterate(&sym, restart_start);
    if !first.converged && !restart.converged {
        return Err(Error::Numeric(format!(
            "power iteration did not reach relative tolerance {POWER_ITERATION_TOL:e}"
        )));
    }
    Ok(first.estimate.max(restart.estimate).max(0.0))
}

/// Lower-triangular Cholesky factor `L` with `m = L Lᵀ`.
pub fn cholesky(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let dim = m.nrows();
    let mut l = DMatrix::<f64>::zeros(dim, dim);
    let mut min_pivot = f64::INFINITY;
    let mut failed = false;
    for j in 0..dim {
        let mut diag = m[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        min_pivot = min_pivot.min(diag);
        if !(diag > 0.0) || !diag.is_finite() {
            failed = true;
            // keep scanning for the smallest pivot
            continue;
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..dim {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    if failed {
        return Err(Error::NotPositiveDefinite { min_pivot });
    }
    Ok(l)
}

/// `N(m, P⁻¹)` where `P m = b`, parameterized by the precision `P` and the
/// linear term `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionGaussian {
    precision: DMatrix<f64>,
    linear_term: DVector<f64>,
}

impl PrecisionGaussian {
    /// Checks symmetry to relative tolerance and stores `(P + Pᵀ)/2`.
    pub fn new(precision: DMatrix<f64>, linear_term: DVector<f64>) -> Result<Self> {
        check_symmetric(&precision)?;
        if linear_term.len() != precision.nrows() {
            return Err(Error::param(format!(
                "linear term has length {}, precision is {}x{}",
                linear_term.len(),
                precision.nrows(),
                precision.ncols()
            )));
        }
        let precision = (&precision + precision.transpose()) * 0.5;
        Ok(Self { precision, linear_term })
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    pub fn linear_term(&self) -> &DVector<f64> {
        &self.linear_term
    }

    pub fn dim(&self) -> usize {
        self.linear_term.len()
    }

    /// Mean `P⁻¹ b`.
    pub fn mean(&self) -> Result<DVector<f64>> {
        let l = cholesky(&self.precision)?;
        Ok(solve_with_factor(&l, &self.linear_term))
    }

    /// Copy with `jitter` added to every diagonal entry of the precision.
    pub fn with_jitter(&self, jitter: f64) -> Self {
        let mut precision = self.precision.clone();
        for i in 0..precision.nrows() {
            precision[(i, i)] += jitter;
        }
        Self {
            precision,
            linear_term: self.linear_term.clone(),
        }
    }
}

fn solve_with_factor(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let y = l
        .solve_lower_triangular(b)
        .expect("Cholesky factor has a positive diagonal");
    l.tr_solve_lower_triangular(&y)
        .expect("Cholesky factor has a positive diagonal")
}

/// Draws `m + L⁻ᵀu` with `P = L Lᵀ` and `u` standard normal.
pub fn sample_precision_gaussian<R: Rng + ?Sized>(
    g: &PrecisionGaussian,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let l = cholesky(&g.precision)?;
    let mean = solve_with_factor(&l, &g.linear_term);
    let u = DVector::from_fn(g.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let noise = l
        .tr_solve_lower_triangular(&u)
        .expect("Cholesky factor has a positive diagonal");
    Ok(mean + noise)
}
