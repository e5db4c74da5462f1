use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ball::{sample_ball, BallSpec};
use crate::model::MainPart;
use crate::reconstruction::{build_moment_system, invert_to_tail};
use crate::zeros::ZeroSequence;
use crate::{Error, Result};

const DENOMINATOR_FLOOR: f64 = 1e-14;

/// One pair of the Lipschitz experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityRecord {
    pub r: f64,
    /// ‖w_a − w_b‖ in L₂(−b, b).
    pub numerator: f64,
    /// ‖{μ_nᴺ(z_n^a − z_n^b)}‖ over n ≥ 1 − N.
    pub denominator: f64,
    pub ratio: f64,
    pub seeds: Option<(u64, u64)>,
}

/// Inverts both sequences and compares. `None` when the sequences
/// coincide to within the denominator floor. The recorded radius is the
/// larger of the two residual norms.
pub fn stability_ratio(
    zeros_a: &ZeroSequence,
    zeros_b: &ZeroSequence,
    main: &MainPart,
    m: usize,
) -> Result<Option<StabilityRecord>> {
    if zeros_a.first() != zeros_b.first() || zeros_a.len() != zeros_b.len() {
        return Err(Error::InvalidInput("sequences must cover the same indices".into()));
    }
    let n = main.degree() as u32;
    let denominator = zeros_a
        .zeros()
        .iter()
        .zip(zeros_b.zeros())
        .zip(zeros_a.lattice_points())
        .map(|((a, b), z0)| (crate::model::mu_of(*z0).powu(n) * (a - b)).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if denominator < DENOMINATOR_FLOOR {
        return Ok(None);
    }
    let wa = invert_to_tail(&build_moment_system(zeros_a, main, m, None)?)?.tail;
    let wb = invert_to_tail(&build_moment_system(zeros_b, main, m, None)?)?.tail;
    let numerator = wa.sub(&wb)?.norm();
    let r = zeros_a.residuals().l2_norm.max(zeros_b.residuals().l2_norm);
    Ok(Some(StabilityRecord { r, numerator, denominator, ratio: numerator / denominator, seeds: None }))
}

/// Summary of [`empirical_lipschitz`].
#[derive(Clone, Debug)]
pub struct LipschitzEstimate {
    /// Largest ratio over the kept records.
    pub c_r_est: f64,
    pub records: Vec<StabilityRecord>,
    pub mean: f64,
    pub stddev: f64,
    /// Trials whose inversion failed, with the error name.
    pub failures: Vec<((u64, u64), &'static str)>,
}

/// Seed pairs for the trials; the first `t` pairs do not depend on the
/// total, so doubling the trial count extends the same experiment.
pub fn trial_seeds(seed: u64, trials: usize) -> Vec<(u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| (rng.random(), rng.random())).collect()
}

/// Max of stability ratios over independent pairs drawn from the ball.
pub fn empirical_lipschitz(
    spec: &BallSpec,
    trials: usize,
    seed: u64,
    main: &MainPart,
    m: usize,
) -> Result<LipschitzEstimate> {
    if trials < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 trials, got {trials}")));
    }
    let outcomes: Vec<((u64, u64), Result<Option<StabilityRecord>>)> = trial_seeds(seed, trials)
        .into_par_iter()
        .map(|(sa, sb)| {
            let run = || -> Result<Option<StabilityRecord>> {
                let a = sample_ball(main, spec, sa)?;
                let b = sample_ball(main, spec, sb)?;
                Ok(stability_ratio(&a, &b, main, m)?.map(|rec| StabilityRecord { r: spec.r, seeds: Some((sa, sb)), ..rec }))
            };
            ((sa, sb), run())
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (seeds, out) in outcomes {
        match out {
            Ok(Some(rec)) => records.push(rec),
            Ok(None) => {}
            Err(e) if e.is_validation() => return Err(e),
            Err(e) => failures.push((seeds, e.name())),
        }
    }
    let k = records.len() as f64;
    let mean = records.iter().map(|r| r.ratio).sum::<f64>() / k.max(1.0);
    let var = records.iter().map(|r| (r.ratio - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    let c_r_est = records.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(LipschitzEstimate { c_r_est, records, mean, stddev: var.sqrt(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FourierTail, ThetaFunction};
    use crate::zeros::localize_zeros;
    use crate::C64;
    use std::f64::consts::PI;

    #[test]
    fn identical_sequences_are_dropped() {
        let main = MainPart::monomial_sin(PI, 1).unwrap();
        let a = sample_ball(&main, &BallSpec::new(0.5, 40), 3).unwrap();
        assert_eq!(stability_ratio(&a, &a, &main, 8).unwrap(), None);
    }

    #[test]
    fn fixture_against_lattice() {
        let main = MainPart::monomial_sin(PI, 1).unwrap();
        let tail = FourierTail::from_modes(PI, 3, [(1, C64::new(0.04, 0.01)), (-3, C64::new(0.02, 0.0))]).unwrap();
        let theta = ThetaFunction::new(main.clone(), tail.clone()).unwrap();
        let a = localize_zeros(&theta, 80).unwrap().zeros;
        let b = ZeroSequence::lattice(&main, 80);
        let rec = stability_ratio(&a, &b, &main, 16).unwrap().unwrap();
        assert!((rec.numerator - tail.norm()).abs() < 1e-8 * tail.norm());
        assert!((rec.denominator - a.residuals().l2_norm).abs() < 1e-12);
        let swapped = stability_ratio(&b, &a, &main, 16).unwrap().unwrap();
        assert_eq!(swapped.ratio, rec.ratio);
    }

    #[test]
    fn doubling_keeps_prefix() {
        let s = trial_seeds(4, 10);
        assert_eq!(&trial_seeds(4, 20)[..10], &s[..]);
    }

    #[test]
    fn small_ball_ratio_concentrates() {
        let main = MainPart::monomial_sin(PI, 1).unwrap();
        let est = empirical_lipschitz(&BallSpec::new(1e-3, 64), 200, 11, &main, 16).unwrap();
        assert!(est.failures.is_empty());
        assert!(est.records.iter().all(|r| r.ratio.is_finite()));
        assert!(est.stddev / est.mean < 0.5, "{} / {}", est.stddev, est.mean);
    }

    #[test]
    fn linear_in_small_perturbations() {
        let main = MainPart::monomial_sin(PI, 1).unwrap();
        let spec = BallSpec::new(1e-4, 64);
        let a = sample_ball(&main, &spec, 1).unwrap();
        let b = ZeroSequence::lattice(&main, 64);
        let ka = a.residuals().kappa;
        let doubled: Vec<C64> = ka.iter().map(|k| k * 2.0).collect();
        let a2 = ZeroSequence::from_kappa(&main, main.first_index(), &doubled).unwrap();
        let r1 = stability_ratio(&a, &b, &main, 16).unwrap().unwrap();
        let r2 = stability_ratio(&a2, &b, &main, 16).unwrap().unwrap();
        let q = r2.ratio / r1.ratio;
        assert!((0.95..=1.05).contains(&q), "{q}");
    }

    #[test]
    fn shared_head_still_gives_finite_ratios() {
        let main = MainPart::monomial_sin(PI, 1).unwrap();
        let spec = BallSpec::new(0.5, 64);
        for seed in 0..10 {
            let a = sample_ball(&main, &spec, seed).unwrap();
            let b = sample_ball(&main, &spec, seed + 100).unwrap().with_head(a.head()).unwrap();
            let rec = stability_ratio(&a, &b, &main, 16).unwrap().unwrap();
            assert!(rec.ratio.is_finite() && rec.ratio > 0.0);
        }
    }

    #[test]
    fn larger_ball_is_not_more_stable() {
        let main = MainPart::monomial_sin(PI, 1).unwrap();
        let small = empirical_lipschitz(&BallSpec::new(0.5, 128), 200, 7, &main, 16).unwrap();
        let large = empirical_lipschitz(&BallSpec::new(2.0, 128), 200, 7, &main, 16).unwrap();
        assert!(small.c_r_est <= large.c_r_est * 1.2, "{} vs {}", small.c_r_est, large.c_r_est);
    }
}
