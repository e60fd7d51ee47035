//! Log-gamma and regularized incomplete gamma functions.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_ITER: usize = 10_000;
const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;

/// Natural log of Γ(x) for x > 0 (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::domain(format!("ln_gamma needs finite x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1−x) = π / sin(πx).
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete gamma for a fixed shape, with Γ(a) cached.
///
/// Used where the same shape is evaluated many times (quadrature nodes,
/// coding-rate searches).
#[derive(Debug, Clone, Copy)]
pub struct IncompleteGamma {
    a: f64,
    ln_gamma_a: f64,
}

impl IncompleteGamma {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0) || a.is_infinite() {
            return Err(Error::domain(format!("incomplete gamma needs finite a > 0, got {a}")));
        }
        Ok(Self {
            a,
            ln_gamma_a: ln_gamma_unchecked(a),
        })
    }

    pub fn shape(&self) -> f64 {
        self.a
    }

    /// (P(a, x), Q(a, x)) with P + Q = 1.
    pub fn pq(&self, x: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("incomplete gamma needs x >= 0, got {x}")));
        }
        Ok(self.pq_unchecked(x))
    }

    pub fn upper(&self, x: f64) -> Result<f64> {
        self.pq(x).map(|(_, q)| q)
    }

    pub fn lower(&self, x: f64) -> Result<f64> {
        self.pq(x).map(|(p, _)| p)
    }

    pub(crate) fn pq_unchecked(&self, x: f64) -> (f64, f64) {
        let a = self.a;
        if x == 0.0 {
            return (0.0, 1.0);
        }
        if x.is_infinite() {
            return (1.0, 0.0);
        }
        let log_prefactor = a * x.ln() - x - self.ln_gamma_a;
        if x < a + 1.0 {
            let p = (log_prefactor.exp() * lower_series(a, x)).min(1.0);
            (p, 1.0 - p)
        } else {
            let q = (log_prefactor.exp() * upper_fraction(a, x)).min(1.0);
            (1.0 - q, q)
        }
    }
}

/// Σ x^n / (a (a+1) ... (a+n)), the series factor of γ(a, x).
fn lower_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum
}

/// Continued fraction for Γ(a, x) e^x x^{-a} (modified Lentz).
fn upper_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Q(a, x) = Γ(a, x)/Γ(a).
pub fn reg_upper_gamma(a: f64, x: f64) -> Result<f64> {
    IncompleteGamma::new(a)?.upper(x)
}

/// P(a, x) = γ(a, x)/Γ(a).
pub fn reg_lower_gamma(a: f64, x: f64) -> Result<f64> {
    IncompleteGamma::new(a)?.lower(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-15);
        assert!(rel(ln_gamma(5.0).unwrap(), 24f64.ln()) < 1e-12);
        let half = 0.5 * std::f64::consts::PI.ln();
        assert!(rel(ln_gamma(0.5).unwrap(), half) < 1e-12);
        assert!((ln_gamma(0.5).unwrap() - 0.572_364_9).abs() < 1e-7);
    }

    #[test]
    fn ln_gamma_small_arguments_use_reflection() {
        // Γ(x) ~ 1/x − γ_E near zero.
        let x: f64 = 1e-8;
        let expected = -(x.ln()) - 0.577_215_664_901_532_9 * x;
        assert!((ln_gamma(x).unwrap() - expected).abs() < 1e-12);
        // Γ(0.25) = 3.625609908221908...
        assert!(rel(ln_gamma(0.25).unwrap(), 3.625_609_908_221_908_3f64.ln()) < 1e-13);
    }

    #[test]
    fn ln_gamma_rejects_non_positive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }

    #[test]
    fn upper_gamma_closed_forms() {
        for x in [0.0, 0.3, 1.0, 4.5, 20.0] {
            assert!(rel(reg_upper_gamma(1.0, x).unwrap(), (-x).exp()) < 1e-13);
        }
        assert_eq!(reg_upper_gamma(3.7, 0.0).unwrap(), 1.0);
        assert!((reg_upper_gamma(2.0, 1.0).unwrap() - 0.735_759).abs() < 1e-6);
        assert!(rel(reg_upper_gamma(2.0, 1.0).unwrap(), 2.0 * (-1f64).exp()) < 1e-13);
    }

    #[test]
    fn upper_gamma_half_shape_is_erfc() {
        // Q(1/2, x) = erfc(√x); erfc(1) = 0.15729920705028513.
        assert!(rel(reg_upper_gamma(0.5, 1.0).unwrap(), 0.157_299_207_050_285_13) < 1e-12);
    }

    #[test]
    fn upper_gamma_domain_errors() {
        assert!(reg_upper_gamma(0.0, 1.0).is_err());
        assert!(reg_upper_gamma(-1.0, 1.0).is_err());
        assert!(reg_upper_gamma(1.0, -0.1).is_err());
    }

    #[test]
    fn upper_gamma_limits() {
        assert_eq!(reg_upper_gamma(4.0, f64::INFINITY).unwrap(), 0.0);
        assert!(reg_upper_gamma(4.0, 1e4).unwrap() < 1e-300);
        let (p, q) = IncompleteGamma::new(3.3).unwrap().pq(2.0).unwrap();
        assert!((p + q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn upper_gamma_decreasing_in_x() {
        let ig = IncompleteGamma::new(3.13).unwrap();
        let mut prev = 1.0;
        for i in 1..400 {
            let q = ig.upper(i as f64 * 0.05).unwrap();
            assert!(q <= prev);
            assert!((0.0..=1.0).contains(&q));
            prev = q;
        }
    }
}
