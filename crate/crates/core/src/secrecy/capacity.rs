use rand::Rng;
use rayon::prelude::*;

use crate::channel::{complex_normal_matrix, complex_normal_vector, ChannelSet, Dimensions, LinkBudget};
use crate::error::{check_len, Error, Result};
use crate::manifold::{optimize_phases, EffectiveChannel, OptimizerSettings, PhaseVector};
use crate::quadrature::{integrate, QuadSettings};
use crate::rng::{domain, SeedStream};
use crate::secrecy::GammaFit;
use crate::special::IncompleteGamma;

/// `(C_m − C_w)⁺` for one channel realization and fixed phases.
pub fn instantaneous_secrecy_rate(ch: &ChannelSet, q: &PhaseVector, budget: &LinkBudget) -> Result<f64> {
    check_len("secrecy rate (phases vs IRS elements)", ch.h.len(), q.len())?;
    budget.validate()?;
    let reflected = ch.h.component_mul(q.as_vector());
    let main_gain = (&ch.l + &ch.a * &reflected).norm_squared();
    let eve_gain = (&ch.g + &ch.z * &reflected).norm_squared();
    let c_m = (budget.main_snr() * main_gain).ln_1p() / std::f64::consts::LN_2;
    let c_w = (budget.eve_snr() * eve_gain).ln_1p() / std::f64::consts::LN_2;
    Ok((c_m - c_w).max(0.0))
}

/// Ergodic wiretap capacity `E[log2(1 + SNR_e·x)]` under the Gamma model.
///
/// Integrates `Q(μ, s z)/(1+z)` over `z ∈ [0, ∞)` with
/// `s = σ_e²/(ν P α_e²)`, after compactifying through `z = t/(1−t)`. The
/// integral is taken in `w = 1 − t`, which keeps full relative precision in
/// the slowly decaying tail near `t → 1`:
/// `∫₀¹ Q(μ, s(1−w)/w) / w dw`.
pub fn ergodic_wiretap_capacity(fit: &GammaFit, budget: &LinkBudget) -> Result<f64> {
    ergodic_wiretap_capacity_with(fit, budget, QuadSettings::default())
}

pub fn ergodic_wiretap_capacity_with(fit: &GammaFit, budget: &LinkBudget, settings: QuadSettings) -> Result<f64> {
    budget.validate()?;
    let snr = budget.eve_snr();
    if snr == 0.0 {
        return Ok(0.0);
    }
    let scale = 1.0 / (fit.nu * snr);
    let ig = IncompleteGamma::new(fit.mu)?;
    let integrand = |w: f64| {
        if w <= 0.0 {
            return 0.0;
        }
        ig.pq_unchecked(scale * (1.0 - w) / w).1 / w
    };
    // Tolerance is stated on the result in bits.
    let nats = QuadSettings {
        abs_tol: settings.abs_tol * std::f64::consts::LN_2,
        ..settings
    };
    Ok(integrate(integrand, 0.0, 1.0, nats)?.value / std::f64::consts::LN_2)
}

/// `[C̄_m − E(C_w)]⁺`, the lower bound used as the ergodic secrecy rate.
pub fn ergodic_secrecy_rate(c_m_bar: f64, fit: &GammaFit, budget: &LinkBudget) -> Result<f64> {
    if !(c_m_bar >= 0.0) {
        return Err(Error::domain(format!("main capacity must be >= 0, got {c_m_bar}")));
    }
    if c_m_bar == 0.0 {
        return Ok(0.0);
    }
    Ok((c_m_bar - ergodic_wiretap_capacity(fit, budget)?).max(0.0))
}

/// Draws only the legitimate blocks `(l, A, h)`, in the same order as
/// [`crate::channel::sample_channel_set`].
pub fn sample_legitimate<R: Rng + ?Sized>(rng: &mut R, dims: Dimensions) -> EffectiveChannel {
    let l = complex_normal_vector(rng, dims.n_bs);
    let a = complex_normal_matrix(rng, dims.n_bs, dims.n_irs);
    let h = complex_normal_vector(rng, dims.n_irs);
    EffectiveChannel::new(l, &a, &h).expect("shapes follow dims")
}

/// Optimized legitimate channel gains `|l + Θq*|²`, one per channel draw.
///
/// The ergodic main capacity for any link budget is the pool average of
/// `log2(1 + α²P/σ² · gain)`, so one pool serves every sensor that shares
/// the antenna configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GainPool {
    gains: Vec<f64>,
}

impl GainPool {
    pub fn from_gains(gains: Vec<f64>) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::TooFewSamples { required: 1, actual: 0 });
        }
        if gains.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::domain("channel gains must be >= 0"));
        }
        Ok(Self { gains })
    }

    /// Runs `optimize` on `runs` channels produced by `sample`.
    pub fn measure<S, O>(runs: usize, mut sample: S, mut optimize: O) -> Result<Self>
    where
        S: FnMut(usize) -> EffectiveChannel,
        O: FnMut(usize, &EffectiveChannel) -> Result<f64>,
    {
        let gains = (0..runs)
            .map(|i| {
                let ec = sample(i);
                optimize(i, &ec)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_gains(gains)
    }

    /// Rayleigh draws optimized by conjugate gradient. Draw `i` uses the
    /// channel and optimizer streams at index `i`, so the pool is identical
    /// whether computed serially or in parallel.
    pub fn rayleigh(seeds: SeedStream, dims: Dimensions, settings: &OptimizerSettings, runs: usize) -> Result<Self> {
        let gains = (0..runs)
            .into_par_iter()
            .map(|i| {
                let ec = sample_legitimate(&mut seeds.rng(domain::CHANNEL, i as u64), dims);
                let mut rng = seeds.rng(domain::OPTIMIZER, i as u64);
                optimize_phases(&ec, settings, &mut rng).map(|o| o.gain)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_gains(gains)
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    /// Mean of `log2(1 + snr · gain)` over the pool.
    pub fn ergodic_capacity(&self, snr: f64) -> f64 {
        let total: f64 = self.gains.iter().map(|g| (snr * g).ln_1p()).sum();
        total / (self.gains.len() as f64 * std::f64::consts::LN_2)
    }
}

/// Statistical estimate of `C̄_m`: mean over `runs` draws of
/// `log2(1 + (α²P/σ²)·optimized gain)`.
pub fn measure_main_ergodic_capacity<S, O>(sample: S, optimize: O, budget: &LinkBudget, runs: usize) -> Result<f64>
where
    S: FnMut(usize) -> EffectiveChannel,
    O: FnMut(usize, &EffectiveChannel) -> Result<f64>,
{
    if runs == 0 {
        return Err(Error::domain("runs must be >= 1"));
    }
    budget.validate()?;
    Ok(GainPool::measure(runs, sample, optimize)?.ergodic_capacity(budget.main_snr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_channel_set;
    use crate::manifold::channel_gain;
    use crate::secrecy::gamma_fit;
    use nalgebra::dvector;
    use num_complex::Complex64;

    fn unit_budget(snr_main: f64, snr_eve: f64) -> LinkBudget {
        LinkBudget {
            alpha: snr_main.sqrt(),
            alpha_e: snr_eve.sqrt(),
            power_w: 1.0,
            noise_w: 1.0,
            noise_e_w: 1.0,
            bandwidth_hz: 1.0,
        }
    }

    #[test]
    fn secrecy_rate_zero_when_identical_links() {
        // Eve sees exactly the legitimate channel and SNR.
        let dims = Dimensions::new(4, 2, 2).unwrap();
        let mut rng = SeedStream::new(1).rng(0, 0);
        let mut ch = sample_channel_set(&mut rng, dims);
        ch.g = ch.l.clone();
        ch.z = ch.a.clone();
        let q = PhaseVector::random(&mut rng, 4);
        let r = instantaneous_secrecy_rate(&ch, &q, &unit_budget(3.0, 3.0)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn secrecy_rate_without_leakage_is_main_capacity() {
        let dims = Dimensions::new(4, 2, 2).unwrap();
        let mut rng = SeedStream::new(2).rng(0, 0);
        let ch = sample_channel_set(&mut rng, dims);
        let q = PhaseVector::random(&mut rng, 4);
        let budget = unit_budget(5.0, 0.0);
        let gain = channel_gain(&q, &EffectiveChannel::from_channel(&ch)).unwrap();
        let r = instantaneous_secrecy_rate(&ch, &q, &budget).unwrap();
        assert!((r - (1.0 + 5.0 * gain).log2()).abs() < 1e-12);
    }

    #[test]
    fn secrecy_rate_matches_independent_capacities() {
        // Recompute both capacities element by element.
        let dims = Dimensions::new(3, 2, 2).unwrap();
        let mut rng = SeedStream::new(3).rng(0, 0);
        let ch = sample_channel_set(&mut rng, dims);
        let q = PhaseVector::random(&mut rng, 3);
        let budget = LinkBudget {
            alpha: 0.8,
            alpha_e: 0.3,
            power_w: 2.0,
            noise_w: 0.5,
            noise_e_w: 0.4,
            bandwidth_hz: 1.0,
        };
        let link = |direct: &crate::channel::CVector, m: &crate::channel::CMatrix| {
            let mut total = 0.0;
            for i in 0..direct.len() {
                let mut y = direct[i];
                for n in 0..3 {
                    y += m[(i, n)] * q.as_vector()[n] * ch.h[n];
                }
                total += y.norm_sqr();
            }
            total
        };
        let c_m = (1.0 + 0.64 * 2.0 / 0.5 * link(&ch.l, &ch.a)).log2();
        let c_w = (1.0 + 0.09 * 2.0 / 0.4 * link(&ch.g, &ch.z)).log2();
        let r = instantaneous_secrecy_rate(&ch, &q, &budget).unwrap();
        assert!((r - (c_m - c_w).max(0.0)).abs() < 1e-12);
    }

    #[test]
    fn wiretap_capacity_vanishes_without_eve_power() {
        let fit = gamma_fit(4, 16).unwrap();
        assert_eq!(ergodic_wiretap_capacity(&fit, &unit_budget(1.0, 0.0)).unwrap(), 0.0);
        let tiny = ergodic_wiretap_capacity(&fit, &unit_budget(1.0, 1e-12)).unwrap();
        assert!(tiny < 1e-9);
    }

    /// E1(1) by its convergent series: −γ − Σ (−1)^k / (k·k!).
    fn exp_integral_e1_at_one() -> f64 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for k in 1..30 {
            fact *= k as f64;
            sum += if k % 2 == 1 { 1.0 } else { -1.0 } / (k as f64 * fact);
        }
        -0.577_215_664_901_532_9 + sum
    }

    #[test]
    fn wiretap_capacity_exponential_closed_form() {
        // x ~ Exp(1), SNR 1: E ln(1+x) = e·E1(1).
        let fit = gamma_fit(1, 0).unwrap();
        let c = ergodic_wiretap_capacity(&fit, &unit_budget(1.0, 1.0)).unwrap();
        let expected = std::f64::consts::E * exp_integral_e1_at_one() / std::f64::consts::LN_2;
        assert!((c - expected).abs() < 1e-8, "{c} vs {expected}");
        assert!((c - 0.860_35).abs() < 1e-4);
    }

    #[test]
    fn wiretap_capacity_exponential_monte_carlo() {
        let fit = gamma_fit(1, 0).unwrap();
        let c = ergodic_wiretap_capacity(&fit, &unit_budget(1.0, 1.0)).unwrap();
        let mut rng = SeedStream::new(4).rng(0, 0);
        let n = 1_000_000;
        let mc = (0..n).map(|_| fit.sample(&mut rng).ln_1p()).sum::<f64>() / n as f64 / std::f64::consts::LN_2;
        assert!((c - mc).abs() < 0.005 * mc);
    }

    #[test]
    fn wiretap_capacity_high_snr_monte_carlo() {
        let fit = gamma_fit(4, 16).unwrap();
        let snr = 10f64.powf(6.3);
        let c = ergodic_wiretap_capacity(&fit, &unit_budget(1.0, snr)).unwrap();
        let mut rng = SeedStream::new(5).rng(0, 0);
        let n = 100_000;
        let mc = (0..n).map(|_| (snr * fit.sample(&mut rng)).ln_1p()).sum::<f64>() / n as f64
            / std::f64::consts::LN_2;
        assert!((c - mc).abs() < 0.01 * mc, "{c} vs {mc}");
    }

    #[test]
    fn ergodic_rate_clamps() {
        let fit = gamma_fit(2, 8).unwrap();
        let budget = unit_budget(1.0, 100.0);
        assert_eq!(ergodic_secrecy_rate(0.0, &fit, &budget).unwrap(), 0.0);
        assert_eq!(ergodic_secrecy_rate(0.1, &fit, &budget).unwrap(), 0.0);
        let no_eve = unit_budget(1.0, 0.0);
        assert_eq!(ergodic_secrecy_rate(3.5, &fit, &no_eve).unwrap(), 3.5);
        assert!(ergodic_secrecy_rate(-1.0, &fit, &budget).is_err());
    }

    #[test]
    fn main_capacity_deterministic_without_reflection() {
        let l = dvector![Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.0)];
        let ec = EffectiveChannel {
            theta: crate::channel::CMatrix::zeros(2, 3),
            l: l.clone(),
        };
        let budget = unit_budget(2.0, 1.0);
        let settings = OptimizerSettings::for_elements(3);
        let c = measure_main_ergodic_capacity(
            |_| ec.clone(),
            |i, ec| {
                let mut rng = SeedStream::new(1).rng(0, i as u64);
                optimize_phases(ec, &settings, &mut rng).map(|o| o.gain)
            },
            &budget,
            5,
        )
        .unwrap();
        assert!((c - (1.0 + 2.0 * l.norm_squared()).log2()).abs() < 1e-12);
    }

    #[test]
    fn main_capacity_single_run() {
        let dims = Dimensions::new(4, 2, 1).unwrap();
        let seeds = SeedStream::new(6);
        let settings = OptimizerSettings::for_elements(4);
        let pool = GainPool::rayleigh(seeds, dims, &settings, 1).unwrap();
        let budget = unit_budget(0.7, 1.0);
        let single = (1.0 + 0.7 * pool.gains()[0]).log2();
        assert!((pool.ergodic_capacity(budget.main_snr()) - single).abs() < 1e-12);
        assert!(measure_main_ergodic_capacity(|_| unreachable!(), |_, _| Ok(0.0), &budget, 0).is_err());
    }

    #[test]
    fn main_capacity_grows_with_irs_size() {
        // Paired seeds: the larger surface starts from the same direct link.
        let settings = OptimizerSettings::for_elements(16);
        let budget = unit_budget(1.0, 1.0);
        let c = |n| {
            GainPool::rayleigh(SeedStream::new(7), Dimensions::new(n, 2, 1).unwrap(), &settings, 40)
                .unwrap()
                .ergodic_capacity(budget.main_snr())
        };
        let (c4, c8, c16) = (c(4), c(8), c(16));
        assert!(c4 < c8 && c8 < c16, "{c4} {c8} {c16}");
    }

    #[test]
    fn gain_pool_serial_and_parallel_agree() {
        let dims = Dimensions::new(6, 2, 1).unwrap();
        let seeds = SeedStream::new(8);
        let settings = OptimizerSettings::for_elements(6);
        let parallel = GainPool::rayleigh(seeds, dims, &settings, 8).unwrap();
        let serial = GainPool::measure(
            8,
            |i| sample_legitimate(&mut seeds.rng(domain::CHANNEL, i as u64), dims),
            |i, ec| optimize_phases(ec, &settings, &mut seeds.rng(domain::OPTIMIZER, i as u64)).map(|o| o.gain),
        )
        .unwrap();
        assert_eq!(parallel, serial);
    }
}
