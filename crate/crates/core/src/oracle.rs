//! Brute-force quadrature posterior for models with a single covariate.
//!
//! The unnormalized log posterior is evaluated on a uniform grid over
//! `(α, β₁)` and normalized with the trapezoid rule. Each node carries the
//! mass of its trapezoid weight, spread uniformly over the node's cell
//! `[x − h/2, x + h/2]` clipped to the grid. Marginal bins and oracle draws
//! both use that piecewise-uniform measure, so they agree exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Dataset;

pub const DEFAULT_RESOLUTION: usize = 400;
/// Grid edges must sit this far (in log density) below the peak.
pub const EDGE_LOG_DROP: f64 = 27.631_021_115_928_547; // ln 1e12
pub const OPTIMUM_MAX_SWEEPS: usize = 200;
pub const OPTIMUM_TOL: f64 = 1e-10;
const INITIAL_HALF_WIDTH: f64 = 0.5;
const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl Axis {
    fn new(center: f64, half_width: f64, nodes: usize) -> Self {
        Self { lo: center - half_width, hi: center + half_width, nodes }
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.nodes - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    /// Node `i`'s cell, clipped to `[lo, hi]`.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let x = self.node(i);
        let h = 0.5 * self.step();
        ((x - h).max(self.lo), (x + h).min(self.hi))
    }

    fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.nodes {
            0.5
        } else {
            1.0
        }
    }

    /// Spreads per-node masses over `bins` equal-width bins on `[lo, hi]`.
    pub fn bin(&self, node_mass: &[f64], bins: usize) -> Vec<f64> {
        let width = (self.hi - self.lo) / bins as f64;
        let mut out = vec![0.0; bins];
        for (i, &m) in node_mass.iter().enumerate() {
            let (a, b) = self.cell(i);
            let len = b - a;
            if m == 0.0 || len <= 0.0 {
                continue;
            }
            let first = (((a - self.lo) / width).floor() as usize).min(bins - 1);
            let last = (((b - self.lo) / width).floor() as usize).min(bins - 1);
            for (k, slot) in out.iter_mut().enumerate().take(last + 1).skip(first) {
                let lo = self.lo + k as f64 * width;
                let hi = if k + 1 == bins { self.hi } else { lo + width };
                let overlap = (b.min(hi) - a.max(lo)).max(0.0);
                *slot += m * overlap / len;
            }
        }
        out
    }

    /// Index of the equal-width bin containing `x`, or `None` outside `[lo, hi]`.
    pub fn bin_index(&self, x: f64, bins: usize) -> Option<usize> {
        if !(x >= self.lo && x <= self.hi) {
            return None;
        }
        let k = ((x - self.lo) / (self.hi - self.lo) * bins as f64).floor() as usize;
        Some(k.min(bins - 1))
    }
}

/// Normalized posterior on a grid over `(α, β₁)`.
#[derive(Debug, Clone)]
pub struct OracleGrid {
    axes: [Axis; 2],
    /// Normalized log density, row-major with `α` as the slow index.
    log_density: Vec<f64>,
    cell_mass: Vec<f64>,
    cumulative: Vec<f64>,
    optimum: (f64, f64),
}

impl OracleGrid {
    pub fn resolution(&self) -> usize {
        self.axes[0].nodes
    }

    /// Axis 0 is `α`, axis 1 is `β₁`.
    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn log_density(&self) -> &[f64] {
        &self.log_density
    }

    pub fn cell_mass(&self) -> &[f64] {
        &self.cell_mass
    }

    /// Penalized-likelihood optimum the grid was centred on.
    pub fn optimum(&self) -> (f64, f64) {
        self.optimum
    }

    pub fn total_mass(&self) -> f64 {
        self.cell_mass.iter().sum()
    }

    /// Marginal mass per node along axis `k`.
    pub fn marginal(&self, k: usize) -> Vec<f64> {
        let r = self.resolution();
        let mut out = vec![0.0; r];
        for i in 0..r {
            for j in 0..r {
                let m = self.cell_mass[i * r + j];
                out[if k == 0 { i } else { j }] += m;
            }
        }
        out
    }

    /// Marginal mass in `bins` equal-width bins over axis `k`.
    pub fn marginal_bins(&self, k: usize, bins: usize) -> Vec<f64> {
        self.axes[k].bin(&self.marginal(k), bins)
    }

    /// Posterior mean of coordinate `k`.
    pub fn mean(&self, k: usize) -> f64 {
        let axis = &self.axes[k];
        self.marginal(k)
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let (a, b) = axis.cell(i);
                m * 0.5 * (a + b)
            })
            .sum()
    }

    /// Posterior variance of coordinate `k`.
    pub fn variance(&self, k: usize) -> f64 {
        let axis = &self.axes[k];
        let mean = self.mean(k);
        self.marginal(k)
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let (a, b) = axis.cell(i);
                let c = 0.5 * (a + b) - mean;
                m * (c * c + (b - a) * (b - a) / 12.0)
            })
            .sum()
    }

    /// Exact draw from the grid measure: a cell by mass, then uniform inside it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let total = *self.cumulative.last().expect("grid is non-empty");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1);
        let r = self.resolution();
        let (i, j) = (idx / r, idx % r);
        let (a0, a1) = self.axes[0].cell(i);
        let (b0, b1) = self.axes[1].cell(j);
        (a0 + (a1 - a0) * rng.random::<f64>(), b0 + (b1 - b0) * rng.random::<f64>())
    }
}

fn objective(data: &Dataset, alpha: f64, beta: &[f64]) -> Result<f64> {
    Ok(-data.log_posterior_unnormalized(alpha, beta)?)
}

/// Minimizes a convex function of one variable: bracket by doubling steps
/// from `x0`, then golden-section search.
fn minimize_1d(f: &mut dyn FnMut(f64) -> Result<f64>, x0: f64) -> Result<f64> {
    let f0 = f(x0)?;
    let mut step = 0.25_f64.max(x0.abs() * 0.25);
    let (mut lo, mut hi);
    let fr = f(x0 + step)?;
    if fr < f0 {
        lo = x0;
        let mut mid = x0 + step;
        let mut fmid = fr;
        loop {
            step *= 2.0;
            let next = mid + step;
            let fnext = f(next)?;
            if fnext >= fmid {
                hi = next;
                break;
            }
            lo = mid;
            mid = next;
            fmid = fnext;
            if !next.is_finite() {
                return Err(Error::Numeric("penalized objective is unbounded below".into()));
            }
        }
    } else {
        hi = x0 + step;
        let mut mid = x0;
        let mut fmid = f0;
        loop {
            let next = mid - step;
            let fnext = f(next)?;
            if fnext >= fmid {
                lo = next;
                break;
            }
            hi = mid;
            mid = next;
            fmid = fnext;
            step *= 2.0;
            if !next.is_finite() {
                return Err(Error::Numeric("penalized objective is unbounded below".into()));
            }
        }
    }
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if (hi - lo).abs() <= OPTIMUM_TOL * (1.0 + c.abs()) {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Minimizer of `ℓ(α, β) + θ²α²/2 + λ‖β‖₁` by cyclic coordinate descent;
/// a slope is set to exactly zero when that is no worse.
pub fn penalized_optimum(data: &Dataset) -> Result<(f64, Vec<f64>)> {
    let p = data.p();
    let mut alpha = 0.0;
    let mut beta = vec![0.0; p];
    for _ in 0..OPTIMUM_MAX_SWEEPS {
        let mut change: f64 = 0.0;
        let new_alpha = minimize_1d(&mut |a| objective(data, a, &beta), alpha)?;
        change = change.max((new_alpha - alpha).abs());
        alpha = new_alpha;
        for j in 0..p {
            let mut trial = beta.clone();
            let mut g = |b: f64| {
                trial[j] = b;
                objective(data, alpha, &trial)
            };
            let mut bj = minimize_1d(&mut g, beta[j])?;
            if g(0.0)? <= g(bj)? {
                bj = 0.0;
            }
            change = change.max((bj - beta[j]).abs());
            beta[j] = bj;
        }
        if change < OPTIMUM_TOL {
            break;
        }
    }
    Ok((alpha, beta))
}

fn max_edge_log_density(data: &Dataset, axes: &[Axis; 2]) -> Result<[f64; 2]> {
    let mut out = [f64::NEG_INFINITY; 2];
    for (k, slot) in out.iter_mut().enumerate() {
        let (fixed, moving) = (&axes[k], &axes[1 - k]);
        for edge in [fixed.lo, fixed.hi] {
            for i in 0..moving.nodes {
                let m = moving.node(i);
                let (a, b) = if k == 0 { (edge, m) } else { (m, edge) };
                *slot = slot.max(data.log_posterior_unnormalized(a, &[b])?);
            }
        }
    }
    Ok(out)
}

/// Quadrature posterior on a `resolution × resolution` grid whose bounds are
/// expanded symmetrically about the penalized optimum until the log density
/// on every edge is `ln 1e12` below the peak.
pub fn quadrature_oracle(data: &Dataset, resolution: usize) -> Result<OracleGrid> {
    if data.p() != 1 {
        return Err(Error::Unsupported(format!(
            "quadrature oracle needs exactly one covariate, dataset has p = {}",
            data.p()
        )));
    }
    if resolution < 3 {
        return Err(Error::param(format!("resolution must be at least 3, got {resolution}")));
    }
    let (a_opt, b_opt) = penalized_optimum(data)?;
    let b_opt = b_opt[0];
    let peak = data.log_posterior_unnormalized(a_opt, &[b_opt])?;
    let mut half = [INITIAL_HALF_WIDTH; 2];
    let centers = [a_opt, b_opt];
    let make_axes = |half: &[f64; 2]| {
        [
            Axis::new(centers[0], half[0], resolution),
            Axis::new(centers[1], half[1], resolution),
        ]
    };
    let mut doublings = 0;
    loop {
        let edges = max_edge_log_density(data, &make_axes(&half))?;
        let mut expanded = false;
        for k in 0..2 {
            if edges[k] > peak - EDGE_LOG_DROP {
                half[k] *= 2.0;
                expanded = true;
            }
        }
        if !expanded {
            break;
        }
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::GridBounds(format!(
                "edges still within ln(1e12) of the peak after {MAX_DOUBLINGS} doublings (half widths {half:?})"
            )));
        }
    }
    let axes = make_axes(&half);
    let r = resolution;
    let mut raw = vec![0.0; r * r];
    for i in 0..r {
        let a = axes[0].node(i);
        for j in 0..r {
            raw[i * r + j] = data.log_posterior_unnormalized(a, &[axes[1].node(j)])?;
        }
    }
    let grid_peak = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(peak);
    if !grid_peak.is_finite() {
        return Err(Error::Numeric("log posterior is not finite on the grid".into()));
    }
    let edges = max_edge_log_density(data, &axes)?;
    if let Some(k) = (0..2).find(|&k| edges[k] > grid_peak - EDGE_LOG_DROP) {
        return Err(Error::GridBounds(format!(
            "{} edge density is only {:.3} below the peak; widen the grid beyond {:?}",
            ["alpha", "beta"][k],
            grid_peak - edges[k],
            (axes[k].lo - half[k], axes[k].hi + half[k])
        )));
    }
    let mut cell_mass = vec![0.0; r * r];
    let mut total = 0.0;
    for i in 0..r {
        for j in 0..r {
            let w = axes[0].trapezoid_weight(i) * axes[1].trapezoid_weight(j);
            let m = w * (raw[i * r + j] - grid_peak).exp();
            cell_mass[i * r + j] = m;
            total += m;
        }
    }
    let log_z = grid_peak + (total * axes[0].step() * axes[1].step()).ln();
    let log_density = raw.iter().map(|v| v - log_z).collect();
    for m in &mut cell_mass {
        *m /= total;
    }
    let mut acc = 0.0;
    let cumulative = cell_mass
        .iter()
        .map(|m| {
            acc += m;
            acc
        })
        .collect();
    Ok(OracleGrid {
        axes,
        log_density,
        cell_mass,
        cumulative,
        optimum: (a_opt, b_opt),
    })
}
