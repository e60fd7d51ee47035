use serde::{Deserialize, Serialize};

use crate::channel::LinkBudget;
use crate::error::{Error, Result};
use crate::special::IncompleteGamma;

/// Wiretap-code rate together with the tolerated secrecy-outage probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodingPolicy {
    pub rate: f64,
    pub outage_cap: f64,
}

impl CodingPolicy {
    pub fn new(rate: f64, outage_cap: f64) -> Result<Self> {
        if !(rate >= 0.0) {
            return Err(Error::domain(format!("coding rate must be >= 0, got {rate}")));
        }
        if !(outage_cap > 0.0 && outage_cap < 1.0) {
            return Err(Error::domain(format!("outage cap must lie in (0, 1), got {outage_cap}")));
        }
        Ok(Self { rate, outage_cap })
    }
}

/// Result of [`optimal_coding_rate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodingDecision {
    pub rate: f64,
    pub effective_rate: f64,
    pub outage: f64,
    /// False when no positive rate meets the outage cap; `rate` is then 0.
    pub feasible: bool,
}

/// Conditional outage model for one burst: the legitimate capacity and
/// `|Φh|²` are known, Eve's channels are not.
struct OutageModel {
    c_m: f64,
    irs_gain: f64,
    eve_snr: f64,
    shape: IncompleteGamma,
}

impl OutageModel {
    fn new(c_m: f64, irs_gain: f64, n_eve: usize, budget: &LinkBudget) -> Result<Self> {
        budget.validate()?;
        if !(c_m >= 0.0 && c_m.is_finite()) {
            return Err(Error::domain(format!("main capacity must be finite and >= 0, got {c_m}")));
        }
        if !(irs_gain >= 0.0) {
            return Err(Error::domain(format!("|Φh|² must be >= 0, got {irs_gain}")));
        }
        if n_eve == 0 {
            return Err(Error::domain("at least one eavesdropper antenna is required"));
        }
        Ok(Self {
            c_m,
            irs_gain,
            eve_snr: budget.eve_snr(),
            shape: IncompleteGamma::new(n_eve as f64)?,
        })
    }

    fn check_rate(&self, rate: f64) -> Result<()> {
        if !(rate >= 0.0 && rate <= self.c_m) {
            return Err(Error::domain(format!(
                "coding rate {rate} outside [0, C_m = {}]",
                self.c_m
            )));
        }
        Ok(())
    }

    /// (P(outage), 1 − P(outage)), each computed without cancellation.
    fn outage_pair(&self, rate: f64) -> (f64, f64) {
        if rate >= self.c_m {
            return (1.0, 0.0);
        }
        if self.eve_snr == 0.0 {
            return (0.0, 1.0);
        }
        // φ = σ_e²(2^{C_m − R̂} − 1)/(α_e² P)
        let phi = ((self.c_m - rate) * std::f64::consts::LN_2).exp_m1() / self.eve_snr;
        let (lower, upper) = self.shape.pq_unchecked(phi / (1.0 + self.irs_gain));
        (upper, lower)
    }

    fn effective(&self, rate: f64) -> f64 {
        self.outage_pair(rate).1 * rate
    }
}

/// Secrecy outage probability `Γ(N_e, φ/(1+|Φh|²))/Γ(N_e)`.
///
/// Given `|Φh|²`, `g + ZΦh` is complex normal with per-antenna variance
/// `1 + |Φh|²`, so the wiretap gain is `(1+|Φh|²)·Gamma(N_e, 1)` and the
/// expression is exact.
pub fn outage_probability(
    policy_rate: f64,
    c_m: f64,
    irs_gain: f64,
    n_eve: usize,
    budget: &LinkBudget,
) -> Result<f64> {
    let model = OutageModel::new(c_m, irs_gain, n_eve, budget)?;
    model.check_rate(policy_rate)?;
    Ok(model.outage_pair(policy_rate).0)
}

/// `(1 − P(R̂))·R̂`.
pub fn effective_secrecy_rate(
    policy_rate: f64,
    c_m: f64,
    irs_gain: f64,
    n_eve: usize,
    budget: &LinkBudget,
) -> Result<f64> {
    let model = OutageModel::new(c_m, irs_gain, n_eve, budget)?;
    model.check_rate(policy_rate)?;
    Ok(model.effective(policy_rate))
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Returns the best point seen (including the endpoints) once the bracket
/// is narrower than `tol`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut best = [(a, f(a)), (b, f(b))]
        .into_iter()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("two candidates");
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        for cand in [(c, fc), (d, fd)] {
            if cand.1 > best.1 {
                best = cand;
            }
        }
    }
    best
}

/// Rate maximizing the effective secrecy rate subject to
/// `P(R̂) ≤ outage_cap`.
///
/// The outage probability increases with the rate, so the feasible set is
/// `[0, R_cap]` with `R_cap` found by bisection; the effective rate is
/// unimodal on it and maximized by golden-section search. `outage_cap = 1`
/// removes the constraint.
pub fn optimal_coding_rate(
    c_m: f64,
    irs_gain: f64,
    n_eve: usize,
    budget: &LinkBudget,
    outage_cap: f64,
) -> Result<CodingDecision> {
    if !(outage_cap > 0.0 && outage_cap <= 1.0) {
        return Err(Error::domain(format!("outage cap must lie in (0, 1], got {outage_cap}")));
    }
    let model = OutageModel::new(c_m, irs_gain, n_eve, budget)?;
    let (p0, _) = model.outage_pair(0.0);
    if c_m == 0.0 || p0 > outage_cap {
        return Ok(CodingDecision {
            rate: 0.0,
            effective_rate: 0.0,
            outage: p0,
            feasible: c_m > 0.0 && p0 <= outage_cap,
        });
    }

    let upper = if outage_cap >= 1.0 {
        c_m
    } else {
        let (mut lo, mut hi) = (0.0, c_m);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if model.outage_pair(mid).0 <= outage_cap {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };

    let tol = 1e-10 * c_m.max(1.0);
    let (rate, effective_rate) = golden_section_max(|r| model.effective(r), 0.0, upper, tol);
    Ok(CodingDecision {
        rate,
        effective_rate,
        outage: model.outage_pair(rate).0,
        feasible: true,
    })
}
