//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
//!
//! The subinterval with the largest error estimate is bisected until the
//! summed estimate drops below the absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            max_intervals: 2_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::Degenerate(format!(
            "non-finite integrand on [{lo:e}, {hi:e}]"
        )));
    }
    Ok(Segment {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over `[lo, hi]` to absolute tolerance `settings.abs_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, settings: QuadSettings) -> Result<QuadResult> {
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::domain(format!("invalid integration interval [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 1,
            evaluations: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod15(&mut f, lo, hi)?;
    let mut value = first.value;
    let mut error = first.error;
    let mut evaluations = 15;
    heap.push(first);

    while error > settings.abs_tol {
        if heap.len() >= settings.max_intervals {
            return Err(Error::Quadrature {
                estimate: value,
                error,
                intervals: heap.len(),
                tolerance: settings.abs_tol,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval cannot be split further in floating point.
            return Err(Error::Quadrature {
                estimate: value,
                error,
                intervals: heap.len() + 1,
                tolerance: settings.abs_tol,
            });
        }
        let left = kronrod15(&mut f, worst.lo, mid)?;
        let right = kronrod15(&mut f, mid, worst.hi)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(QuadResult {
        value,
        error,
        intervals: heap.len(),
        evaluations,
    })
}
