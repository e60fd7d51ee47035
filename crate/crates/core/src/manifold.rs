//! Riemannian conjugate gradient on the complex circle manifold
//! `{q ∈ ℂᴺ : |q_n| = 1}`, used to pick IRS phase shifts that maximize the
//! legitimate channel gain `|l + A diag(h) q|²`.
//!
//! Inner products on ℂᴺ are the real ones, `⟨u, v⟩ = Re(uᴴv)`, so a
//! Euclidean gradient `∇f` satisfies `Df(q)[δ] = ⟨∇f, δ⟩`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{complex_normal_vector, CMatrix, CVector, ChannelSet};
use crate::error::{check_len, Error, Result};

/// Maximum deviation of `|q_n|` from one accepted by [`PhaseVector::new`].
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

const MAX_BACKTRACKS: usize = 60;

/// IRS configuration: one unit-modulus reflection coefficient per element.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(CVector);

impl PhaseVector {
    pub fn new(q: CVector) -> Result<Self> {
        if let Some((n, v)) = q
            .iter()
            .enumerate()
            .find(|(_, v)| (v.norm() - 1.0).abs() > UNIT_MODULUS_TOL)
        {
            return Err(Error::domain(format!(
                "phase vector element {n} has modulus {} (not unit)",
                v.norm()
            )));
        }
        Ok(Self(q))
    }

    pub fn from_angles(theta: &[f64]) -> Self {
        Self(DVector::from_iterator(
            theta.len(),
            theta.iter().map(|&t| Complex64::from_polar(1.0, t)),
        ))
    }

    /// Uniformly random phases.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let angles: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        Self::from_angles(&angles)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    pub fn angles(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.arg()).collect()
    }

    /// Largest `||q_n| − 1|`.
    pub fn max_modulus_error(&self) -> f64 {
        self.0.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// `Θ = A diag(h)` together with the direct link `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub theta: CMatrix,
    pub l: CVector,
}

impl EffectiveChannel {
    pub fn new(l: CVector, a: &CMatrix, h: &CVector) -> Result<Self> {
        check_len("effective channel (rows of A vs l)", l.len(), a.nrows())?;
        Ok(Self {
            theta: effective_channel(a, h)?,
            l,
        })
    }

    pub fn from_channel(ch: &ChannelSet) -> Self {
        Self::new(ch.l.clone(), &ch.a, &ch.h).expect("ChannelSet blocks are consistent")
    }

    pub fn n_irs(&self) -> usize {
        self.theta.ncols()
    }

    pub fn n_bs(&self) -> usize {
        self.l.len()
    }

    /// `l + Θq`.
    /// `Θq` alone.
    fn reflected(&self, q: &CVector) -> CVector {
        let mut r = CVector::zeros(self.l.len());
        for (k, qk) in q.iter().enumerate() {
            for (ri, tik) in r.iter_mut().zip(self.theta.column(k).iter()) {
                *ri += tik * qk;
            }
        }
        r
    }

    fn received(&self, q: &CVector) -> CVector {
        let mut r = self.l.clone();
        for (k, qk) in q.iter().enumerate() {
            for (ri, tik) in r.iter_mut().zip(self.theta.column(k).iter()) {
                *ri += tik * qk;
            }
        }
        r
    }

    /// `−2Θᴴ r`.
    fn grad_from_received(&self, r: &CVector) -> CVector {
        DVector::from_fn(self.n_irs(), |k, _| {
            let dot: Complex64 = self
                .theta
                .column(k)
                .iter()
                .zip(r.iter())
                .map(|(t, ri)| t.conj() * ri)
                .sum();
            -2.0 * dot
        })
    }

    fn check(&self, q: &PhaseVector) -> Result<()> {
        check_len("phase vector vs IRS elements", self.n_irs(), q.len())
    }
}

/// `A diag(h)`: column k of A scaled by `h_k`.
pub fn effective_channel(a: &CMatrix, h: &CVector) -> Result<CMatrix> {
    check_len("effective channel (columns of A vs h)", a.ncols(), h.len())?;
    let mut theta = a.clone();
    for (k, hk) in h.iter().enumerate() {
        for v in theta.column_mut(k).iter_mut() {
            *v *= hk;
        }
    }
    Ok(theta)
}

/// `f(q) = −|l + Θq|²`, the minimization form of the gain objective.
pub fn objective(q: &PhaseVector, ec: &EffectiveChannel) -> Result<f64> {
    channel_gain(q, ec).map(|g| -g)
}

/// `|l + Θq|²`.
pub fn channel_gain(q: &PhaseVector, ec: &EffectiveChannel) -> Result<f64> {
    ec.check(q)?;
    Ok(ec.received(q.as_vector()).norm_squared())
}

/// `∇f = −2ΘᴴΘq − 2Θᴴl`.
pub fn euclidean_grad(q: &PhaseVector, ec: &EffectiveChannel) -> Result<CVector> {
    ec.check(q)?;
    Ok(ec.grad_from_received(&ec.received(q.as_vector())))
}

/// Orthogonal projection onto the tangent space at `q`: `v − Re(v ∘ q*) ∘ q`.
pub fn project_tangent(v: &CVector, q: &PhaseVector) -> Result<CVector> {
    check_len("tangent projection", q.len(), v.len())?;
    Ok(project_unchecked(v, q.as_vector()))
}

fn project_unchecked(v: &CVector, q: &CVector) -> CVector {
    v.zip_map(q, |vn, qn| vn - qn * (vn * qn.conj()).re)
}

/// Riemannian gradient: the tangent projection of the Euclidean gradient.
pub fn riemannian_grad(q: &PhaseVector, ec: &EffectiveChannel) -> Result<CVector> {
    let egrad = euclidean_grad(q, ec)?;
    Ok(project_unchecked(&egrad, q.as_vector()))
}

/// Elementwise normalization `y_n / |y_n|`.
pub fn retract(y: &CVector) -> Result<PhaseVector> {
    if let Some(n) = y.iter().position(|v| !(v.norm() > 0.0) || !v.norm().is_finite()) {
        return Err(Error::Degenerate(format!(
            "cannot retract: element {n} has modulus {}",
            y[n].norm()
        )));
    }
    Ok(PhaseVector(y.map(|v| v / v.norm())))
}

/// Carries a tangent vector into the tangent space at `q_next`.
pub fn transport(p: &CVector, q_next: &PhaseVector) -> Result<CVector> {
    project_tangent(p, q_next)
}

/// `retract(q + t·d) − q` without subtracting nearly equal unit numbers:
/// each entry is `(t·d − q(|y| − 1)) / |y|` with
/// `|y| − 1 = (|y|² − 1) / (|y| + 1)`. `|q|` is taken as exactly 1; its
/// rounding error would otherwise leak into the radial direction, where the
/// Euclidean gradient is large.
fn retraction_step(q: &CVector, dir: &CVector, t: f64) -> CVector {
    q.zip_map(dir, |qn, dn| {
        let td = dn * t;
        let y = qn + td;
        let m = y.norm();
        let m_sq_minus_1 = 2.0 * (qn.conj() * td).re + td.norm_sqr();
        (td - qn * (m_sq_minus_1 / (m + 1.0))) / m
    })
}

fn real_inner(u: &CVector, v: &CVector) -> f64 {
    u.iter().zip(v.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Stop once the Riemannian gradient norm is at most this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Backtracking factor in (0, 1).
    pub armijo_shrink: f64,
    /// Sufficient-decrease constant in (0, 1).
    pub armijo_slope: f64,
    /// First trial step, in units of `1/‖Θ‖_F²`.
    pub initial_step: f64,
}

impl OptimizerSettings {
    /// Defaults for `n` IRS elements (`max_iters = 10·n²`).
    pub fn for_elements(n: usize) -> Self {
        Self {
            grad_tol: 1e-6,
            max_iters: (10 * n * n).max(1),
            armijo_shrink: 0.5,
            armijo_slope: 1e-4,
            initial_step: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.grad_tol > 0.0
            && self.max_iters >= 1
            && self.armijo_shrink > 0.0
            && self.armijo_shrink < 1.0
            && self.armijo_slope > 0.0
            && self.armijo_slope < 1.0
            && self.initial_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid optimizer settings: {self:?}")))
        }
    }
}

/// Snapshot handed to the observer of [`optimize_phases_observed`].
#[derive(Debug, Clone, Copy)]
pub struct Iterate<'a> {
    pub index: usize,
    pub phases: &'a PhaseVector,
    pub gain: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub phases: PhaseVector,
    pub gain: f64,
    pub initial_gain: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    /// Gradient norm reached `grad_tol`. False when the iteration budget ran
    /// out or the line search could not make progress.
    pub converged: bool,
}

pub fn optimize_phases<R: Rng + ?Sized>(
    ec: &EffectiveChannel,
    settings: &OptimizerSettings,
    rng: &mut R,
) -> Result<OptimizeOutcome> {
    optimize_phases_observed(ec, settings, rng, |_| {})
}

/// Conjugate-gradient descent of `f(q) = −|l + Θq|²` on the circle manifold.
///
/// Polak–Ribière+ directions with transported gradients, restarted to
/// steepest descent whenever the direction is not a descent direction. Steps
/// are chosen by Armijo backtracking, so the gain never decreases between
/// accepted iterates. The observer sees the start point and every accepted
/// iterate.
pub fn optimize_phases_observed<R, F>(
    ec: &EffectiveChannel,
    settings: &OptimizerSettings,
    rng: &mut R,
    mut observer: F,
) -> Result<OptimizeOutcome>
where
    R: Rng + ?Sized,
    F: FnMut(Iterate<'_>),
{
    settings.validate()?;
    let n = ec.n_irs();

    let mut q = loop {
        // A zero draw has probability zero, but retract rejects it.
        if let Ok(q) = retract(&complex_normal_vector(rng, n)) {
            break q;
        }
    };
    let mut r = ec.received(q.as_vector());
    let mut f = -r.norm_squared();
    let mut grad = project_unchecked(&ec.grad_from_received(&r), q.as_vector());
    let mut grad_sq = grad.norm_squared();
    let initial_gain = -f;
    observer(Iterate {
        index: 0,
        phases: &q,
        gain: -f,
        grad_norm: grad_sq.sqrt(),
    });

    let theta_sq = ec.theta.norm_squared();
    let mut step = if theta_sq > 0.0 {
        settings.initial_step / theta_sq
    } else {
        0.0
    };
    let mut dir = -grad.clone();
    let mut iterations = 0;
    let mut stalled = false;
    let tol_sq = settings.grad_tol * settings.grad_tol;

    while grad_sq > tol_sq && iterations < settings.max_iters {
        let mut slope = real_inner(&grad, &dir);
        if slope >= 0.0 {
            dir = -grad.clone();
            slope = -grad_sq;
        }

        let mut trial = step;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let y = q.as_vector() + dir.scale(trial);
            if let Ok(cand) = retract(&y) {
                // Gain change from the residual difference, so the test keeps
                // resolving progress after the gain itself stops changing in
                // double precision.
                let d = ec.reflected(&retraction_step(q.as_vector(), &dir, trial));
                let decrease = -real_inner(&d, &(r.scale(2.0) + &d));
                if decrease <= settings.armijo_slope * trial * slope {
                    let r_c = ec.received(cand.as_vector());
                    let f_c = -r_c.norm_squared();
                    accepted = Some((cand, r_c, f_c));
                    break;
                }
            }
            trial *= settings.armijo_shrink;
        }
        let Some((q_next, r_next, f_next)) = accepted else {
            stalled = true;
            break;
        };

        let grad_next = project_unchecked(&ec.grad_from_received(&r_next), q_next.as_vector());
        let grad_prev = project_unchecked(&grad, q_next.as_vector());
        let dir_prev = project_unchecked(&dir, q_next.as_vector());
        let beta = (real_inner(&grad_next, &(&grad_next - &grad_prev)) / grad_sq).max(0.0);
        dir = -&grad_next + dir_prev.scale(beta);

        q = q_next;
        r = r_next;
        f = f_next;
        grad = grad_next;
        grad_sq = grad.norm_squared();
        step = 2.0 * trial;
        iterations += 1;
        observer(Iterate {
            index: iterations,
            phases: &q,
            gain: -f,
            grad_norm: grad_sq.sqrt(),
        });
    }
    Ok(OptimizeOutcome {
        gain: -f,
        initial_gain,
        iterations,
        grad_norm: grad_sq.sqrt(),
        converged: !stalled && grad_sq <= tol_sq,
        phases: q,
    })
}

/// Global optimum for a single-antenna BS.
///
/// With `N_b = 1` the gain is `|l + Σ a_n h_n q_n|²`, maximized by rotating
/// every reflected term onto the phase of `l`, which gives
/// `(|l| + Σ|a_n h_n|)²`. By the triangle inequality no unit-modulus `q`
/// does better.
pub fn analytic_optimum_miso(l: Complex64, a_row: &[Complex64], h: &[Complex64]) -> Result<(PhaseVector, f64)> {
    check_len("analytic optimum (a_row vs h)", a_row.len(), h.len())?;
    let reference = if l.norm() > 0.0 { l.arg() } else { 0.0 };
    let mut total = l.norm();
    let angles: Vec<f64> = a_row
        .iter()
        .zip(h)
        .map(|(a, hn)| {
            let c = a * hn;
            total += c.norm();
            reference - if c.norm() > 0.0 { c.arg() } else { 0.0 }
        })
        .collect();
    Ok((PhaseVector::from_angles(&angles), total * total))
}
