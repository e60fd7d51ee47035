use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::channel::{complex_normal, Dimensions};
use crate::error::{check_len, Error, Result};
use crate::manifold::PhaseVector;
use crate::special::{ln_gamma, IncompleteGamma};

/// Minimum sample count accepted by [`pdf_divergence`].
pub const MIN_DIVERGENCE_SAMPLES: usize = 10_000;

/// Gamma(shape `mu`, scale `nu`) model of the wiretap gain `|g + ZΦh|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub mu: f64,
    pub nu: f64,
}

impl GammaFit {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(mu > 0.0 && nu > 0.0 && mu.is_finite() && nu.is_finite()) {
            return Err(Error::domain(format!("Gamma fit needs mu, nu > 0 (got {mu}, {nu})")));
        }
        Ok(Self { mu, nu })
    }

    pub fn mean(&self) -> f64 {
        self.mu * self.nu
    }

    pub fn variance(&self) -> f64 {
        self.mu * self.nu * self.nu
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        wiretap_gain_pdf(x, self)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        wiretap_gain_cdf(x, self)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Gamma::new(self.mu, self.nu)
            .expect("validated shape and scale")
            .sample(rng)
    }
}

/// Moment-matched Gamma model for `N_e` eavesdropper antennas and `N` IRS
/// elements.
///
/// The true gain has mean `N_e(1+N)` and variance
/// `N_e(1+N)² + (N_e+N_e²)N`; shape = mean²/variance, scale =
/// variance/mean.
pub fn gamma_fit(n_eve: usize, n_irs: usize) -> Result<GammaFit> {
    if n_eve == 0 {
        return Err(Error::domain("Gamma fit needs at least one eavesdropper antenna"));
    }
    let ne = n_eve as f64;
    let n1 = 1.0 + n_irs as f64;
    let cross = (1.0 + ne) * n_irs as f64;
    let mu = ne * n1 * n1 / (n1 * n1 + cross);
    let nu = n1 + cross / n1;
    GammaFit::new(mu, nu)
}

pub fn wiretap_gain_pdf(x: f64, fit: &GammaFit) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("gain must be >= 0, got {x}")));
    }
    let GammaFit { mu, nu } = *fit;
    if x == 0.0 {
        return Ok(match mu.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => 1.0 / nu,
            _ => 0.0,
        });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let log_pdf = (mu - 1.0) * x.ln() - x / nu - ln_gamma(mu)? - mu * nu.ln();
    Ok(log_pdf.exp())
}

pub fn wiretap_gain_cdf(x: f64, fit: &GammaFit) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("gain must be >= 0, got {x}")));
    }
    IncompleteGamma::new(fit.mu)?.lower(x / fit.nu)
}

/// One exact draw of `|g + ZΦh|²` with fresh `g`, `Z`, `h` and fixed phases.
pub fn sample_wiretap_gain<R: Rng + ?Sized>(rng: &mut R, dims: Dimensions, q: &PhaseVector) -> Result<f64> {
    check_len("wiretap gain (phases vs IRS elements)", dims.n_irs, q.len())?;
    // Φh first, then each Eve antenna's row of Z and entry of g.
    let reflected: Vec<_> = q.as_vector().iter().map(|qn| qn * complex_normal(rng)).collect();
    let mut gain = 0.0;
    for _ in 0..dims.n_eve {
        let mut y = complex_normal(rng);
        for u in &reflected {
            y += complex_normal(rng) * u;
        }
        gain += y.norm_sqr();
    }
    Ok(gain)
}

/// Maximum absolute gap between the model density and an empirical
/// histogram density.
///
/// Bins are equal-width over `[0, empirical 99.9th percentile]`. The model
/// density is averaged over each bin through CDF differences; the empirical
/// density is `count / (total · width)`.
pub fn pdf_divergence(samples: &[f64], fit: &GammaFit, bins: usize) -> Result<f64> {
    if samples.len() < MIN_DIVERGENCE_SAMPLES {
        return Err(Error::TooFewSamples {
            required: MIN_DIVERGENCE_SAMPLES,
            actual: samples.len(),
        });
    }
    if bins == 0 {
        return Err(Error::domain("pdf divergence needs at least one bin"));
    }
    if samples.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::domain("gain samples must be finite and nonnegative"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let upper = percentile_sorted(&sorted, 0.999);
    if !(upper > 0.0) {
        return Err(Error::Degenerate("all samples are zero".into()));
    }
    let width = upper / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &sorted {
        if x > upper {
            break;
        }
        let idx = ((x / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let total = samples.len() as f64;
    let ig = IncompleteGamma::new(fit.mu)?;
    let mut prev_cdf = 0.0;
    let mut worst: f64 = 0.0;
    for (i, &count) in counts.iter().enumerate() {
        let right = (i + 1) as f64 * width;
        let cdf = ig.lower(right / fit.nu)?;
        let model = (cdf - prev_cdf) / width;
        let empirical = count as f64 / (total * width);
        worst = worst.max((model - empirical).abs());
        prev_cdf = cdf;
    }
    Ok(worst)
}

/// Kolmogorov–Smirnov statistic `sup |F_emp − F_model|`.
pub fn cdf_sup_distance(samples: &[f64], fit: &GammaFit) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::TooFewSamples { required: 1, actual: 0 });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let ig = IncompleteGamma::new(fit.mu)?;
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("gain samples must be >= 0, got {x}")));
        }
        let f = ig.lower(x / fit.nu)?;
        worst = worst.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    Ok(worst)
}

/// Linear-interpolated percentile of sorted data, `p` in [0, 1].
fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}
