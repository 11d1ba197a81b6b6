#![allow(dead_code)]

use dalasso::oracle::Axis;
use dalasso::synthetic::generate_synthetic;
use dalasso::{Dataset, ModelKind};

/// The n = 20, p = 1, λ = θ = γ = 1 instance used for oracle comparisons.
pub fn toy(kind: ModelKind, n: usize) -> Dataset {
    generate_synthetic(kind, n, 1, 1.0, 0.0, 2024).unwrap().dataset
}

/// Two-sided Kolmogorov-Smirnov statistic of `xs` against `cdf`.
pub fn ks_statistic(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// CDF of the chi-square distribution with one degree of freedom.
pub fn chi2_1_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        libm::erf((x / 2.0).sqrt())
    }
}

/// Normalized histogram on the oracle axis plus an overflow slot.
pub fn axis_histogram(values: &[f64], axis: &Axis, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins + 1];
    for &v in values {
        h[axis.bin_index(v, bins).unwrap_or(bins)] += 1.0;
    }
    let n = values.len() as f64;
    h.iter_mut().for_each(|c| *c /= n);
    h
}

/// Normalized histograms of two samples on `bins` bins at the pooled quantiles.
pub fn quantile_histograms(a: &[f64], b: &[f64], bins: usize) -> (Vec<f64>, Vec<f64>) {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let cuts: Vec<f64> = (1..bins).map(|k| pooled[k * pooled.len() / bins]).collect();
    let hist = |xs: &[f64]| {
        let mut h = vec![0.0; bins];
        for &x in xs {
            h[cuts.partition_point(|&c| c <= x)] += 1.0;
        }
        let n = xs.len() as f64;
        h.iter_mut().for_each(|c| *c /= n);
        h
    };
    (hist(a), hist(b))
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    // split first so narrow peaks are not missed by the initial estimate
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            recurse(f, lo, hi, fa, fm, fb, simpson(fa, fm, fb, lo, hi), tol / pieces as f64, 40)
        })
        .sum()
}

/// Inverse-Gaussian density with tilt `b` and shape parameter `c²`:
/// `c/√(2πx³)·exp(−(|b|x − c)²/(2x))`.
pub fn inv_gaussian_density(x: f64, b: f64, c: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let t = b.abs() * x - c;
    c / (2.0 * std::f64::consts::PI * x * x * x).sqrt() * (-t * t / (2.0 * x)).exp()
}

/// `KL(h(·, b) ‖ h(·, b'))` by quadrature in `t = ln x`.
pub fn inv_gaussian_kl_quadrature(b: f64, b_prime: f64, c: f64) -> f64 {
    let integrand = |t: f64| {
        let x = t.exp();
        let h = inv_gaussian_density(x, b, c);
        if h == 0.0 {
            return 0.0;
        }
        let (u, v) = (b.abs() * x - c, b_prime.abs() * x - c);
        h * (v * v - u * u) / (2.0 * x) * x
    };
    adaptive_simpson(&integrand, -40.0, 40.0, 1e-9)
}

/// Steps an ensemble of exact oracle draws once and returns, per marginal,
/// the TV between the binned ensemble before and after the step.
pub fn one_step_stationarity(data: &Dataset, members: usize, bins: usize, seed: u64) -> [f64; 2] {
    use dalasso::distributions::discrete_tv;
    use dalasso::oracle::quadrature_oracle;
    use dalasso::sampler::{chain_stream, step, ChainState};

    let grid = quadrature_oracle(data, dalasso::oracle::DEFAULT_RESOLUTION).unwrap();
    let mut rng = chain_stream(seed, 0);
    let starts: Vec<(f64, f64)> = (0..members).map(|_| grid.sample(&mut rng)).collect();
    let after: Vec<(f64, f64)> = starts
        .iter()
        .enumerate()
        .map(|(m, &(a, b))| {
            let mut member_rng = chain_stream(seed, m as u64 + 1);
            let next = step(data, &ChainState::new(a, vec![b]), &mut member_rng).unwrap();
            (next.alpha, next.beta[0])
        })
        .collect();
    let mut out = [0.0; 2];
    for (k, slot) in out.iter_mut().enumerate() {
        let pick = |v: &[(f64, f64)]| -> Vec<f64> { v.iter().map(|&(a, b)| if k == 0 { a } else { b }).collect() };
        let before = axis_histogram(&pick(&starts), grid.axis(k), bins);
        let stepped = axis_histogram(&pick(&after), grid.axis(k), bins);
        *slot = discrete_tv(&before, &stepped).unwrap();
    }
    out
}
