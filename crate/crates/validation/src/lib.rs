//! Reference implementations used by the acceptance suite.
//!
//! Nothing here calls into `irs-offload`: every value is computed from first
//! principles or through `statrs`, so agreement with the library is evidence
//! rather than tautology.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Gamma};

/// Circularly symmetric `CN(0, 1)`.
pub fn cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn cn_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| cn(rng)).collect()
}

/// Exact wiretap gain `Σ_e |g_e + Σ_n z_en u_n|²` for a fixed reflected
/// vector `u = Φh`, drawing `g` and `Z` afresh.
pub fn wiretap_gain<R: Rng + ?Sized>(rng: &mut R, u: &[Complex64], n_eve: usize) -> f64 {
    (0..n_eve)
        .map(|_| {
            let y = u.iter().fold(cn(rng), |acc, un| acc + cn(rng) * un);
            y.norm_sqr()
        })
        .sum()
}

/// Gain with `h` redrawn too, so the draws follow the unconditional law.
pub fn unconditional_wiretap_gain<R: Rng + ?Sized>(rng: &mut R, n_irs: usize, n_eve: usize) -> f64 {
    let u = cn_vec(rng, n_irs);
    wiretap_gain(rng, &u, n_eve)
}

/// First two moments of the unconditional wiretap gain.
pub fn wiretap_moments(n_eve: usize, n_irs: usize) -> (f64, f64) {
    let (ne, n) = (n_eve as f64, n_irs as f64);
    (ne * (1.0 + n), ne * (1.0 + n).powi(2) + (ne + ne * ne) * n)
}

/// Moment-matched Gamma as a `statrs` distribution (shape, rate).
pub fn moment_gamma(n_eve: usize, n_irs: usize) -> Gamma {
    let (mean, var) = wiretap_moments(n_eve, n_irs);
    Gamma::new(mean * mean / var, mean / var).expect("positive moments")
}

pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Largest gap between a histogram density and the bin-averaged model
/// density. Equal-width bins cover `[0, q]` with `q` the linearly
/// interpolated 99.9th percentile; samples above `q` are dropped.
pub fn histogram_divergence(samples: &[f64], cdf: impl Fn(f64) -> f64, bins: usize) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total = sorted.len() as f64;
    let pos = 0.999 * (total - 1.0);
    let (i, frac) = (pos.floor() as usize, pos.fract());
    let upper = sorted[i] + frac * (sorted[(i + 1).min(sorted.len() - 1)] - sorted[i]);
    let width = upper / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in sorted.iter().take_while(|&&x| x <= upper) {
        counts[((x / width) as usize).min(bins - 1)] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let lo = b as f64 * width;
            let model = (cdf(lo + width) - cdf(lo)) / width;
            (c as f64 / (total * width) - model).abs()
        })
        .fold(0.0, f64::max)
}

/// `E[log2(1 + snr·X)]` for `X ~ dist`, written as
/// `∫ snr·(1 − F(x)) / (1 + snr·x) dx / ln 2` and integrated with Simpson's
/// rule in `ln x`.
pub fn gamma_log_capacity(dist: &Gamma, snr: f64) -> f64 {
    let mean = dist.shape() / dist.rate();
    let sd = dist.shape().sqrt() / dist.rate();
    let (lo, hi) = ((1e-12 / snr).ln(), (mean + 60.0 * sd + 60.0 / dist.rate()).ln());
    let steps = 40_000;
    let h = (hi - lo) / steps as f64;
    let f = |u: f64| {
        let x = u.exp();
        snr * x * dist.sf(x) / (1.0 + snr * x)
    };
    let mut acc = f(lo) + f(hi);
    for i in 1..steps {
        acc += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    // The piece below exp(lo) is at most snr·exp(lo) = 1e-12 nats.
    acc * h / 3.0 / std::f64::consts::LN_2
}

pub fn monte_carlo_log_capacity(snr: f64, gains: &[f64]) -> f64 {
    gains.iter().map(|g| (snr * g).ln_1p()).sum::<f64>() / (gains.len() as f64 * std::f64::consts::LN_2)
}

/// Minimum total cost over all `n!` perfect matchings; `None` entries are
/// forbidden pairs. `None` if no matching avoids them.
pub fn brute_force_assignment(n: usize, cost: impl Fn(usize, usize) -> Option<f64>) -> Option<f64> {
    fn go(row: usize, used: &mut [bool], acc: f64, cost: &dyn Fn(usize, usize) -> Option<f64>, best: &mut Option<f64>) {
        let n = used.len();
        if row == n {
            *best = Some(best.map_or(acc, |b| b.min(acc)));
            return;
        }
        for col in 0..n {
            if used[col] {
                continue;
            }
            if let Some(c) = cost(row, col) {
                used[col] = true;
                go(row + 1, used, acc + c, cost, best);
                used[col] = false;
            }
        }
    }
    let mut best = None;
    go(0, &mut vec![false; n], 0.0, &cost, &mut best);
    best
}

/// Coefficient of determination of the least-squares line through the
/// points.
pub fn linear_fit_r2(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if syy == 0.0 {
        return 1.0;
    }
    let slope = sxy / sxx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    1.0 - sse / syy
}

/// Number of strict local maxima after merging runs of equal values, so a
/// flat top counts once and a flat tail counts not at all.
pub fn count_local_maxima(ys: &[f64]) -> usize {
    let mut runs: Vec<f64> = Vec::with_capacity(ys.len());
    for &y in ys {
        if runs.last() != Some(&y) {
            runs.push(y);
        }
    }
    (0..runs.len())
        .filter(|&i| {
            let left = i == 0 || runs[i - 1] < runs[i];
            let right = i + 1 == runs.len() || runs[i + 1] < runs[i];
            left && right && runs.len() > 1
        })
        .count()
}

/// `Q(a, x) = e^{−x} Σ_{k<a} x^k / k!` for integer `a ≥ 1`.
pub fn upper_gamma_integer(a: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..a {
        term *= x / k as f64;
        sum += term;
    }
    sum * (-x).exp()
}

/// `ln n!` by direct summation.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln Γ(n + ½) = ln (2n)! − n ln 4 − ln n! + ½ ln π`.
pub fn ln_gamma_half_integer(n: u32) -> f64 {
    ln_factorial(2 * n) - n as f64 * 4f64.ln() - ln_factorial(n) + 0.5 * std::f64::consts::PI.ln()
}
