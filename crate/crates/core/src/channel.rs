//! Rayleigh channel realizations and link budgets.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// Antenna and element counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    /// IRS elements; zero disables the reflected path.
    pub n_irs: usize,
    /// Base-station antennas.
    pub n_bs: usize,
    /// Eavesdropper antennas.
    pub n_eve: usize,
}

impl Dimensions {
    pub fn new(n_irs: usize, n_bs: usize, n_eve: usize) -> Result<Self> {
        let dims = Self { n_irs, n_bs, n_eve };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bs == 0 || self.n_eve == 0 {
            return Err(Error::Config(format!(
                "n_bs and n_eve must be at least 1 (got n_bs={}, n_eve={})",
                self.n_bs, self.n_eve
            )));
        }
        Ok(())
    }
}

/// One realization of every channel block seen by a single sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Direct sensor → BS link, length `n_bs`.
    pub l: CVector,
    /// IRS → BS, `n_bs × n_irs`.
    pub a: CMatrix,
    /// Sensor → IRS, length `n_irs`.
    pub h: CVector,
    /// Sensor → Eve, length `n_eve`.
    pub g: CVector,
    /// IRS → Eve, `n_eve × n_irs`.
    pub z: CMatrix,
}

impl ChannelSet {
    pub fn dims(&self) -> Dimensions {
        Dimensions {
            n_irs: self.h.len(),
            n_bs: self.l.len(),
            n_eve: self.g.len(),
        }
    }
}

/// Path losses, powers and noise floors for one sensor's uplink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Amplitude path loss toward the BS.
    pub alpha: f64,
    /// Amplitude path loss toward Eve.
    pub alpha_e: f64,
    pub power_w: f64,
    pub noise_w: f64,
    pub noise_e_w: f64,
    pub bandwidth_hz: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [("alpha", self.alpha), ("alpha_e", self.alpha_e)];
        let positive = [
            ("power_w", self.power_w),
            ("noise_w", self.noise_w),
            ("noise_e_w", self.noise_e_w),
            ("bandwidth_hz", self.bandwidth_hz),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Receive SNR per unit channel gain at the BS: α²P/σ².
    pub fn main_snr(&self) -> f64 {
        self.alpha * self.alpha * self.power_w / self.noise_w
    }

    /// Receive SNR per unit channel gain at Eve: α_e²P/σ_e².
    pub fn eve_snr(&self) -> f64 {
        self.alpha_e * self.alpha_e * self.power_w / self.noise_e_w
    }
}

/// Free-space amplitude path loss τ/(2π f_c d).
pub fn path_loss(distance_m: f64, carrier_hz: f64) -> Result<f64> {
    if !(distance_m > 0.0 && carrier_hz > 0.0) {
        return Err(Error::domain(format!(
            "path loss needs positive distance and frequency (d={distance_m}, f_c={carrier_hz})"
        )));
    }
    Ok(SPEED_OF_LIGHT / (2.0 * std::f64::consts::PI * carrier_hz * distance_m))
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1000.0
}

/// One CN(0, 1) draw: (x + iy)/√2 with x, y standard normal.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_normal_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVector {
    DVector::from_fn(len, |_, _| complex_normal(rng))
}

pub fn complex_normal_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Draws all five blocks with i.i.d. CN(0, 1) entries.
///
/// Draw order is fixed (l, A, h, g, Z) so a seed fully determines the set.
pub fn sample_channel_set<R: Rng + ?Sized>(rng: &mut R, dims: Dimensions) -> ChannelSet {
    let l = complex_normal_vector(rng, dims.n_bs);
    let a = complex_normal_matrix(rng, dims.n_bs, dims.n_irs);
    let h = complex_normal_vector(rng, dims.n_irs);
    let g = complex_normal_vector(rng, dims.n_eve);
    let z = complex_normal_matrix(rng, dims.n_eve, dims.n_irs);
    ChannelSet { l, a, h, g, z }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    #[test]
    fn path_loss_reference_value() {
        // 2.99792458e8 / (2π · 2.4e9 · 40) = 4.970151e-4
        let v = path_loss(40.0, 2.4e9).unwrap();
        assert!((v - 4.970_151e-4).abs() < 1e-9, "{v}");
    }

    #[test]
    fn path_loss_unit_distance() {
        let fc = 3.0e9;
        let d = SPEED_OF_LIGHT / (2.0 * std::f64::consts::PI * fc);
        assert!((path_loss(d, fc).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn path_loss_scaling_and_monotonicity() {
        let base = path_loss(30.0, 2.4e9).unwrap();
        assert!((path_loss(60.0, 2.4e9).unwrap() - base / 2.0).abs() < 1e-18);
        assert!((path_loss(90.0, 2.4e9).unwrap() - base / 3.0).abs() < 1e-18);
        assert!(path_loss(31.0, 2.4e9).unwrap() < base);
        assert!(path_loss(30.0, 2.5e9).unwrap() < base);
    }

    #[test]
    fn path_loss_rejects_non_positive() {
        assert!(path_loss(0.0, 2.4e9).is_err());
        assert!(path_loss(10.0, -1.0).is_err());
        assert!(path_loss(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn dbm_conversions() {
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
        assert!((dbm_to_watts(10.0) - 1e-2).abs() < 1e-17);
        assert!((dbm_to_watts(-53.0) - 5.0119e-9).abs() < 1e-12);
    }

    #[test]
    fn channel_shapes() {
        let mut rng = SeedStream::new(1).rng(0, 0);
        let ch = sample_channel_set(&mut rng, Dimensions::new(4, 2, 2).unwrap());
        assert_eq!(ch.l.len(), 2);
        assert_eq!(ch.a.shape(), (2, 4));
        assert_eq!(ch.h.len(), 4);
        assert_eq!(ch.g.len(), 2);
        assert_eq!(ch.z.shape(), (2, 4));
        assert_eq!(ch.dims(), Dimensions::new(4, 2, 2).unwrap());
    }

    #[test]
    fn zero_irs_elements_allowed() {
        let dims = Dimensions::new(0, 3, 1).unwrap();
        let mut rng = SeedStream::new(1).rng(0, 0);
        let ch = sample_channel_set(&mut rng, dims);
        assert_eq!(ch.a.shape(), (3, 0));
        assert!(Dimensions::new(1, 0, 1).is_err());
        assert!(Dimensions::new(1, 1, 0).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let dims = Dimensions::new(5, 3, 2).unwrap();
        let a = sample_channel_set(&mut SeedStream::new(9).rng(2, 11), dims);
        let b = sample_channel_set(&mut SeedStream::new(9).rng(2, 11), dims);
        assert_eq!(a, b);
        let c = sample_channel_set(&mut SeedStream::new(9).rng(2, 12), dims);
        assert_ne!(a, c);
    }

    #[test]
    fn complex_normal_moments() {
        // Mean 0 and E|x|^2 = 1 at 1e5 draws; covariance of distinct entries ~ 0.
        let mut rng = SeedStream::new(5).rng(0, 0);
        let n = 100_000;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut power = 0.0;
        let mut cross = Complex64::new(0.0, 0.0);
        for _ in 0..n {
            let a = complex_normal(&mut rng);
            let b = complex_normal(&mut rng);
            sum += a;
            power += a.norm_sqr();
            cross += a * b.conj();
        }
        let nf = n as f64;
        assert!((sum / nf).norm() < 0.02);
        assert!((power / nf - 1.0).abs() < 0.02);
        // standard error of the cross moment is 1/sqrt(n); 3 sigma.
        assert!((cross / nf).norm() < 3.0 / nf.sqrt());
    }

    #[test]
    fn budget_snr_and_validation() {
        let b = LinkBudget {
            alpha: 0.5,
            alpha_e: 0.0,
            power_w: 2.0,
            noise_w: 0.25,
            noise_e_w: 1.0,
            bandwidth_hz: 1.0,
        };
        b.validate().unwrap();
        assert_eq!(b.main_snr(), 2.0);
        assert_eq!(b.eve_snr(), 0.0);
        assert!(LinkBudget { noise_w: 0.0, ..b }.validate().is_err());
        assert!(LinkBudget { alpha: -1.0, ..b }.validate().is_err());
    }
}
