use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{dbm_to_watts, Dimensions};
use crate::error::{Error, Result};

/// Width of one radio resource block.
pub const RB_BANDWIDTH_HZ: f64 = 150e3;

/// Closed interval for uniform draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::Config(format!("{name}: empty or non-finite range [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    fn validate_positive(&self, name: &str) -> Result<()> {
        self.validate(name)?;
        if self.lo <= 0.0 {
            return Err(Error::Config(format!("{name}: range must be positive, got lower bound {}", self.lo)));
        }
        Ok(())
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }
}

const KIB_BITS: f64 = 8.0 * 1024.0;
const MIB_BITS: f64 = 8.0 * 1024.0 * 1024.0;

/// Every knob of every experiment. TOML files use these field names; any
/// field left out keeps its default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Antenna counts for the offloading population and coding sweep.
    pub dims: Dimensions,
    pub n_sensors: usize,
    pub n_servers: usize,
    /// Bandwidth is `rb_count × 150 kHz`.
    pub rb_count: usize,
    pub distances_m: Range,
    /// Eavesdropper distance; `None` puts Eve at each sensor's own distance.
    pub eve_distances_m: Option<Range>,
    pub carrier_hz: f64,
    /// Server CPU rate `f_k`.
    pub f_range_hz: Range,
    /// Task size `D_i` in bits.
    pub d_range: Range,
    pub gas_range: Range,
    pub power_dbm: f64,
    /// Noise floor at the BS and at Eve.
    pub noise_dbm: f64,
    pub eta: f64,
    pub c_per_bit: f64,
    pub epsilon_dissat: usize,
    pub epsilon_outage: f64,
    /// Monte Carlo trials per experiment point.
    pub runs: usize,
    pub master_seed: u64,

    /// Optimized channel draws behind each `C̄_m` estimate.
    pub capacity_draws: usize,
    /// Wiretap-gain draws for Gamma-fit and quadrature validation.
    pub validation_draws: usize,
    pub pdf_bins: usize,
    /// `(N_e, N)` pairs for Gamma-fit validation.
    pub gamma_configs: Vec<(usize, usize)>,
    pub ergodic_n_values: Vec<usize>,
    pub ergodic_n_eve_values: Vec<usize>,
    pub coding_grid_points: usize,
    pub phase_n_values: Vec<usize>,
    pub phase_n_bs_values: Vec<usize>,
    /// Paired channel draws per phase-benchmark point.
    pub phase_draws: usize,
    pub n_groups: usize,
    pub rb_values: Vec<usize>,
    pub n_irs_values: Vec<usize>,
    pub c_values: Vec<f64>,
    /// Dissatisfaction thresholds to sweep; `None` sweeps `0..n_sensors`.
    pub epsilon_values: Option<Vec<usize>>,
    /// Trials for the threshold sweep, which solves one matching per value.
    pub epsilon_runs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dims: Dimensions {
                n_irs: 40,
                n_bs: 10,
                n_eve: 4,
            },
            n_sensors: 40,
            n_servers: 50,
            rb_count: 2,
            distances_m: Range::new(30.0, 50.0),
            eve_distances_m: None,
            carrier_hz: 2.4e9,
            f_range_hz: Range::new(40e9, 80e9),
            d_range: Range::new(610.0 * KIB_BITS, 1.8 * MIB_BITS),
            gas_range: Range::new(1.5e6, 2e6),
            power_dbm: 10.0,
            noise_dbm: -53.0,
            eta: 1e-27,
            c_per_bit: 10.0,
            epsilon_dissat: 8,
            epsilon_outage: 0.1,
            runs: 10_000,
            master_seed: 2021,
            capacity_draws: 1_000,
            validation_draws: 100_000,
            pdf_bins: 200,
            gamma_configs: vec![(2, 16), (4, 16), (4, 64), (8, 64)],
            ergodic_n_values: vec![8, 16, 32, 64, 128],
            ergodic_n_eve_values: vec![1, 4, 16],
            coding_grid_points: 1_000,
            phase_n_values: vec![0, 8, 16, 32, 64],
            phase_n_bs_values: vec![1, 4, 10],
            phase_draws: 200,
            n_groups: 4,
            rb_values: (1..=8).collect(),
            n_irs_values: vec![10, 20, 40, 80],
            c_values: vec![5.0, 10.0, 15.0, 20.0],
            epsilon_values: None,
            epsilon_runs: 1_000,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.dims.validate()?;
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_sensors == 0 {
            return fail("n_sensors must be at least 1".into());
        }
        if self.n_servers < self.n_sensors {
            return fail(format!(
                "n_servers ({}) must be at least n_sensors ({})",
                self.n_servers, self.n_sensors
            ));
        }
        if self.rb_count == 0 || self.rb_values.contains(&0) {
            return fail("resource block counts must be at least 1".into());
        }
        self.distances_m.validate_positive("distances_m")?;
        if let Some(r) = &self.eve_distances_m {
            r.validate_positive("eve_distances_m")?;
        }
        if !(self.carrier_hz > 0.0) {
            return fail(format!("carrier_hz must be > 0, got {}", self.carrier_hz));
        }
        self.f_range_hz.validate_positive("f_range_hz")?;
        self.d_range.validate_positive("d_range")?;
        self.gas_range.validate_positive("gas_range")?;
        if !self.power_dbm.is_finite() || !self.noise_dbm.is_finite() {
            return fail("power_dbm and noise_dbm must be finite".into());
        }
        if !(self.eta > 0.0) {
            return fail(format!("eta must be > 0, got {}", self.eta));
        }
        if !(self.c_per_bit > 0.0) || self.c_values.iter().any(|c| !(*c > 0.0)) {
            return fail("cycles per bit must be > 0".into());
        }
        if self.epsilon_dissat >= self.n_sensors {
            return fail(format!(
                "epsilon_dissat ({}) must lie in [0, {}]",
                self.epsilon_dissat,
                self.n_sensors - 1
            ));
        }
        if let Some(values) = &self.epsilon_values {
            if values.iter().any(|&e| e >= self.n_sensors) {
                return fail(format!("epsilon_values must lie in [0, {}]", self.n_sensors - 1));
            }
        }
        if !(self.epsilon_outage > 0.0 && self.epsilon_outage <= 1.0) {
            return fail(format!("epsilon_outage must lie in (0, 1], got {}", self.epsilon_outage));
        }
        if [self.runs, self.capacity_draws, self.epsilon_runs, self.validation_draws, self.phase_draws].contains(&0) {
            return fail("run and draw counts must be at least 1".into());
        }
        if self.pdf_bins == 0 || self.coding_grid_points < 3 {
            return fail("pdf_bins must be >= 1 and coding_grid_points >= 3".into());
        }
        if self.n_groups == 0 || self.n_groups > self.n_sensors {
            return fail(format!("n_groups must lie in [1, {}]", self.n_sensors));
        }
        if self.gamma_configs.iter().any(|&(ne, _)| ne == 0)
            || self.ergodic_n_eve_values.contains(&0)
            || self.phase_n_bs_values.contains(&0)
        {
            return fail("antenna counts must be at least 1".into());
        }
        Ok(())
    }

    pub fn power_w(&self) -> f64 {
        dbm_to_watts(self.power_dbm)
    }

    pub fn noise_w(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.rb_count as f64 * RB_BANDWIDTH_HZ
    }
}
