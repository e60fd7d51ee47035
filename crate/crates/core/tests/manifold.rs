use irs_offload::channel::{complex_normal_matrix, complex_normal_vector};
use irs_offload::manifold::{
    analytic_optimum_miso, channel_gain, objective, optimize_phases, optimize_phases_observed, riemannian_grad,
    EffectiveChannel, OptimizerSettings, PhaseVector, UNIT_MODULUS_TOL,
};
use irs_offload::rng::SeedStream;
use num_complex::Complex64;

fn instance(seed: u64, n_bs: usize, n_irs: usize) -> EffectiveChannel {
    let mut rng = SeedStream::new(seed).rng(0, 0);
    let l = complex_normal_vector(&mut rng, n_bs);
    let a = complex_normal_matrix(&mut rng, n_bs, n_irs);
    let h = complex_normal_vector(&mut rng, n_irs);
    EffectiveChannel::new(l, &a, &h).unwrap()
}

#[test]
fn gradient_matches_central_differences() {
    for seed in 0..5 {
        let ec = instance(seed, 4, 12);
        let mut rng = SeedStream::new(seed).rng(1, 0);
        let angles: Vec<f64> = PhaseVector::random(&mut rng, 12).angles();
        let q = PhaseVector::from_angles(&angles);
        let grad = riemannian_grad(&q, &ec).unwrap();
        let dir: Vec<f64> = (0..12).map(|k| ((k * 7 + seed as usize) % 5) as f64 - 2.0).collect();
        // d/dt f(θ + t·dir) = Re⟨grad, i q ⊙ dir⟩
        let analytic: f64 = grad
            .iter()
            .zip(q.as_vector().iter())
            .zip(&dir)
            .map(|((g, qn), d)| (g.conj() * Complex64::i() * qn * d).re)
            .sum();
        let f = |t: f64| {
            let shifted: Vec<f64> = angles.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
            objective(&PhaseVector::from_angles(&shifted), &ec).unwrap()
        };
        let h = 1e-5;
        let numeric = (f(h) - f(-h)) / (2.0 * h);
        assert!((analytic - numeric).abs() <= 1e-5 * analytic.abs().max(1.0), "{analytic} vs {numeric}");
    }
}

#[test]
fn single_antenna_reaches_alignment_optimum() {
    for seed in 0..20 {
        let mut rng = SeedStream::new(100 + seed).rng(0, 0);
        let l = complex_normal_vector(&mut rng, 1);
        let a = complex_normal_matrix(&mut rng, 1, 32);
        let h = complex_normal_vector(&mut rng, 32);
        let ec = EffectiveChannel::new(l.clone(), &a, &h).unwrap();
        let row: Vec<Complex64> = a.row(0).iter().copied().collect();
        let (_, best) = analytic_optimum_miso(l[0], &row, h.as_slice()).unwrap();
        // triangle-inequality bound computed directly
        let bound = (l[0].norm() + row.iter().zip(h.iter()).map(|(a, h)| (a * h).norm()).sum::<f64>()).powi(2);
        assert!((best - bound).abs() <= 1e-10 * bound);
        let out = optimize_phases(&ec, &OptimizerSettings::for_elements(32), &mut SeedStream::new(seed).rng(3, 0)).unwrap();
        assert!(out.gain >= 0.999 * bound, "seed {seed}: {} vs {bound}", out.gain);
    }
}

#[test]
fn iterates_stay_on_manifold_and_improve() {
    let ec = instance(7, 10, 48);
    let mut worst: f64 = 0.0;
    let mut first = None;
    let out = optimize_phases_observed(
        &ec,
        &OptimizerSettings::for_elements(48),
        &mut SeedStream::new(8).rng(0, 0),
        |it| {
            worst = worst.max(it.phases.max_modulus_error());
            first.get_or_insert(it.gain);
        },
    )
    .unwrap();
    assert!(worst <= UNIT_MODULUS_TOL);
    assert!(out.converged);
    assert!(out.gain > first.unwrap());
    assert_eq!(out.gain, channel_gain(&out.phases, &ec).unwrap());
}
