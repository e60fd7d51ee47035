use rayon::prelude::*;

use crate::channel::{sample_channel_set, Dimensions, LinkBudget};
use crate::error::Result;
use crate::harness::{Cell, ExperimentConfig, Table};
use crate::manifold::{
    analytic_optimum_miso, channel_gain, optimize_phases, EffectiveChannel, OptimizerSettings, PhaseVector,
};
use crate::rng::{domain, SeedStream};
use crate::secrecy::{
    cdf_sup_distance, effective_secrecy_rate, ergodic_secrecy_rate, ergodic_wiretap_capacity, gamma_fit,
    optimal_coding_rate, outage_probability, pdf_divergence, sample_legitimate, sample_wiretap_gain, CodingDecision,
    GainPool, GammaFit,
};


// Seed-tree tags, one per experiment.
const TAG_GAMMA: u64 = 0x6761_6d6d;
const TAG_ERGODIC: u64 = 0x6572_676f;
const TAG_CODING: u64 = 0x636f_6469;
const TAG_PHASE: u64 = 0x7068_6173;

/// Path loss 1 on both links: the SNR is `P/σ²` (63 dB with the defaults).
pub(crate) fn unit_path_budget(cfg: &ExperimentConfig) -> LinkBudget {
    LinkBudget {
        alpha: 1.0,
        alpha_e: 1.0,
        power_w: cfg.power_w(),
        noise_w: cfg.noise_w(),
        noise_e_w: cfg.noise_w(),
        bandwidth_hz: cfg.bandwidth_hz(),
    }
}

fn pair_key(a: usize, b: usize) -> u64 {
    ((a as u64) << 32) | b as u64
}

fn mean_log2_1p(snr: f64, xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + (snr * x).ln_1p(), n + 1));
    sum / (n as f64 * std::f64::consts::LN_2)
}

fn gamma_samples(fit: &GammaFit, seeds: &SeedStream, draws: usize) -> Vec<f64> {
    let mut rng = seeds.rng(domain::GAMMA, 0);
    (0..draws).map(|_| fit.sample(&mut rng)).collect()
}

fn wiretap_samples(seeds: &SeedStream, n_irs: usize, n_eve: usize, draws: usize) -> Result<Vec<f64>> {
    let dims = Dimensions { n_irs, n_bs: 1, n_eve };
    // The gain law does not depend on the (fixed) phases; any draw will do.
    let q = PhaseVector::random(&mut seeds.rng(domain::RANDOM_PHASE, 0), n_irs);
    (0..draws)
        .into_par_iter()
        .map(|i| sample_wiretap_gain(&mut seeds.rng(domain::WIRETAP, i as u64), dims, &q))
        .collect()
}

/// Gamma fit against exact wiretap-gain draws, plus the quadrature value of
/// `E(C_w)` against Monte Carlo over Gamma draws and over exact draws.
pub fn run_gamma_validation(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let budget = unit_path_budget(cfg);
    let snr_e = budget.eve_snr();
    let root = SeedStream::new(cfg.master_seed).child(TAG_GAMMA);
    let mut table = Table::new(&[
        "n_eve",
        "n_irs",
        "draws",
        "pdf_divergence",
        "cdf_distance",
        "sample_mean",
        "model_mean",
        "sample_variance",
        "model_variance",
        "ecw_quadrature",
        "ecw_gamma_mc",
        "ecw_wiretap_mc",
    ]);
    for &(n_eve, n_irs) in &cfg.gamma_configs {
        let seeds = root.child(pair_key(n_eve, n_irs));
        let fit = gamma_fit(n_eve, n_irs)?;
        let samples = wiretap_samples(&seeds, n_irs, n_eve, cfg.validation_draws)?;
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let (ne, ni) = (n_eve as f64, n_irs as f64);
        let gammas = gamma_samples(&fit, &seeds, cfg.validation_draws);
        table.push(vec![
            n_eve.into(),
            n_irs.into(),
            samples.len().into(),
            pdf_divergence(&samples, &fit, cfg.pdf_bins)?.into(),
            cdf_sup_distance(&samples, &fit)?.into(),
            mean.into(),
            (ne * (1.0 + ni)).into(),
            var.into(),
            (ne * (1.0 + ni).powi(2) + (ne + ne * ne) * ni).into(),
            ergodic_wiretap_capacity(&fit, &budget)?.into(),
            mean_log2_1p(snr_e, gammas.into_iter()).into(),
            mean_log2_1p(snr_e, samples.into_iter()).into(),
        ]);
    }
    Ok(table)
}

/// `R̄ = [C̄_m − E(C_w)]⁺` over IRS sizes and eavesdropper antenna counts,
/// with `C̄_m` measured over `capacity_draws` optimized channels.
pub fn run_ergodic_sweep(cfg: &ExperimentConfig, n_values: &[usize], n_eve_values: &[usize]) -> Result<Table> {
    cfg.validate()?;
    let budget = unit_path_budget(cfg);
    let root = SeedStream::new(cfg.master_seed).child(TAG_ERGODIC);
    let mut table = Table::new(&[
        "n_irs",
        "n_eve",
        "c_m_bar",
        "ecw_quadrature",
        "ecw_gamma_mc",
        "ecw_wiretap_mc",
        "r_bar",
    ]);
    for &n_irs in n_values {
        let dims = Dimensions::new(n_irs, cfg.dims.n_bs, 1)?;
        let pool = GainPool::rayleigh(
            root.child(n_irs as u64),
            dims,
            &OptimizerSettings::for_elements(n_irs),
            cfg.capacity_draws,
        )?;
        let c_m = pool.ergodic_capacity(budget.main_snr());
        for &n_eve in n_eve_values {
            let seeds = root.child(pair_key(n_eve, n_irs) ^ 1 << 63);
            let fit = gamma_fit(n_eve, n_irs)?;
            let gammas = gamma_samples(&fit, &seeds, cfg.validation_draws);
            let exact = wiretap_samples(&seeds, n_irs, n_eve, cfg.validation_draws)?;
            table.push(vec![
                n_irs.into(),
                n_eve.into(),
                c_m.into(),
                ergodic_wiretap_capacity(&fit, &budget)?.into(),
                mean_log2_1p(budget.eve_snr(), gammas.into_iter()).into(),
                mean_log2_1p(budget.eve_snr(), exact.into_iter()).into(),
                ergodic_secrecy_rate(c_m, &fit, &budget)?.into(),
            ]);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodingSweep {
    /// Rows `(n_eve, kind, rate, outage, effective_rate)`; `kind` is
    /// `grid`, `optimum` (no outage cap) or `capped` (`epsilon_outage`).
    pub table: Table,
    pub c_m: f64,
    pub irs_gain: f64,
    /// Per eavesdropper count: unconstrained and capped decisions.
    pub optima: Vec<(usize, CodingDecision, CodingDecision)>,
}

/// Effective secrecy rate across coding rates on one fixed channel draw.
/// `rate_grid` holds fractions of `C_m` in `[0, 1]`.
pub fn run_coding_sweep(cfg: &ExperimentConfig, rate_grid: &[f64]) -> Result<CodingSweep> {
    cfg.validate()?;
    if rate_grid.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(crate::Error::Config("rate grid fractions must lie in [0, 1]".into()));
    }
    let budget = unit_path_budget(cfg);
    let seeds = SeedStream::new(cfg.master_seed).child(TAG_CODING);
    let ch = sample_channel_set(&mut seeds.rng(domain::CHANNEL, 0), cfg.dims);
    let ec = EffectiveChannel::from_channel(&ch);
    let opt = optimize_phases(
        &ec,
        &OptimizerSettings::for_elements(cfg.dims.n_irs),
        &mut seeds.rng(domain::OPTIMIZER, 0),
    )?;
    let c_m = (budget.main_snr() * opt.gain).ln_1p() / std::f64::consts::LN_2;
    // |Φh|² = ‖h‖² for unit-modulus Φ.
    let irs_gain = ch.h.norm_squared();

    let mut table = Table::new(&["n_eve", "kind", "rate", "outage", "effective_rate"]);
    let mut optima = Vec::new();
    for &n_eve in &cfg.ergodic_n_eve_values {
        for &frac in rate_grid {
            let rate = frac * c_m;
            table.push(vec![
                n_eve.into(),
                "grid".into(),
                rate.into(),
                outage_probability(rate, c_m, irs_gain, n_eve, &budget)?.into(),
                effective_secrecy_rate(rate, c_m, irs_gain, n_eve, &budget)?.into(),
            ]);
        }
        let free = optimal_coding_rate(c_m, irs_gain, n_eve, &budget, 1.0)?;
        let capped = optimal_coding_rate(c_m, irs_gain, n_eve, &budget, cfg.epsilon_outage)?;
        for (kind, d) in [("optimum", &free), ("capped", &capped)] {
            table.push(vec![n_eve.into(), kind.into(), d.rate.into(), d.outage.into(), d.effective_rate.into()]);
        }
        optima.push((n_eve, free, capped));
    }
    Ok(CodingSweep {
        table,
        c_m,
        irs_gain,
        optima,
    })
}

/// Evenly spaced fractions `0, 1/(n−1), …, 1`.
pub fn unit_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBenchDraw {
    pub n_irs: usize,
    pub n_bs: usize,
    pub manifold: f64,
    pub random: f64,
    /// Alignment optimum, single-antenna BS only.
    pub oracle: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBench {
    pub table: Table,
    pub draws: Vec<PhaseBenchDraw>,
}

/// Optimized against random phases on paired channel draws.
pub fn run_phase_bench(cfg: &ExperimentConfig, n_values: &[usize]) -> Result<PhaseBench> {
    cfg.validate()?;
    let root = SeedStream::new(cfg.master_seed).child(TAG_PHASE);
    let mut table = Table::new(&[
        "n_irs",
        "n_bs",
        "draws",
        "gain_manifold",
        "gain_random",
        "gain_oracle",
        "manifold_win_fraction",
        "min_oracle_ratio",
    ]);
    let mut all = Vec::new();
    for &n_bs in &cfg.phase_n_bs_values {
        for &n_irs in n_values {
            let dims = Dimensions::new(n_irs, n_bs, 1)?;
            let seeds = root.child(pair_key(n_irs, n_bs));
            let settings = OptimizerSettings::for_elements(n_irs);
            let draws: Vec<PhaseBenchDraw> = (0..cfg.phase_draws)
                .into_par_iter()
                .map(|i| {
                    let i = i as u64;
                    let ec = sample_legitimate(&mut seeds.rng(domain::CHANNEL, i), dims);
                    let opt = optimize_phases(&ec, &settings, &mut seeds.rng(domain::OPTIMIZER, i))?;
                    let random = PhaseVector::random(&mut seeds.rng(domain::RANDOM_PHASE, i), n_irs);
                    let oracle = if n_bs == 1 {
                        // Θ already folds h into A, so the oracle sees h = 1.
                        let row: Vec<_> = ec.theta.row(0).iter().copied().collect();
                        let ones = vec![num_complex::Complex64::new(1.0, 0.0); n_irs];
                        Some(analytic_optimum_miso(ec.l[0], &row, &ones)?.1)
                    } else {
                        None
                    };
                    Ok(PhaseBenchDraw {
                        n_irs,
                        n_bs,
                        manifold: opt.gain,
                        random: channel_gain(&random, &ec)?,
                        oracle,
                        converged: opt.converged,
                    })
                })
                .collect::<Result<_>>()?;
            let m = draws.len() as f64;
            let mean = |f: &dyn Fn(&PhaseBenchDraw) -> f64| draws.iter().map(f).sum::<f64>() / m;
            let wins = draws.iter().filter(|d| d.manifold > d.random).count() as f64 / m;
            let (oracle_mean, min_ratio) = if n_bs == 1 {
                let ratio = draws
                    .iter()
                    .map(|d| {
                        let o = d.oracle.expect("oracle present for n_bs = 1");
                        if o > 0.0 { d.manifold / o } else { 1.0 }
                    })
                    .fold(f64::INFINITY, f64::min);
                (Cell::Real(mean(&|d| d.oracle.unwrap_or(0.0))), Cell::Real(ratio))
            } else {
                (Cell::Empty, Cell::Empty)
            };
            table.push(vec![
                n_irs.into(),
                n_bs.into(),
                draws.len().into(),
                mean(&|d| d.manifold).into(),
                mean(&|d| d.random).into(),
                oracle_mean,
                wins.into(),
                min_ratio,
            ]);
            all.extend(draws);
        }
    }
    Ok(PhaseBench { table, draws: all })
}
