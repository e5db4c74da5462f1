//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sinetype::model::{FourierTail, MainPart, ThetaFunction};
use sinetype::reconstruction::{
    build_moment_system, complete_zeros, frame_bounds_estimate, invert_to_tail, product_eval_hadamard,
    product_eval_ratio,
};
use sinetype::stability::{empirical_lipschitz, sampled_l2_check, line_shift_check, parseval_l2, BallSpec};
use sinetype::sturm_liouville::{
    lambda_metric, series_norm, spectrum_from_zeros, spectral_stability_experiment, theta_from_u, Profile, Spectrum,
};
use sinetype::zeros::{localize_zeros, winding_count, ZeroSequence};
use sinetype::{Rect, C64};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Random tail with modes |k| ≤ m and ‖w‖ = norm.
fn random_tail(rng: &mut ChaCha8Rng, m: usize, norm: f64) -> FourierTail {
    let modes: Vec<(i64, C64)> =
        (-(m as i64)..=m as i64).map(|k| (k, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).collect();
    let t = FourierTail::from_modes(PI, m, modes).unwrap();
    t.scaled(norm / t.norm())
}

fn fixture(power: usize, tail: FourierTail) -> ThetaFunction {
    ThetaFunction::new(MainPart::monomial_sin(PI, power).unwrap(), tail).unwrap()
}

fn counting_exactness() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for k in 1..=20 {
        let edge = k as f64 + 0.5;
        let rect = Rect::from_bounds(-edge, edge, -1.0, 1.0).unwrap();
        match winding_count(|z: C64| (z * PI).sin(), &rect) {
            Ok(n) if n == 2 * k + 1 => {}
            other => bad.push(format!("K={k}: {other:?}")),
        }
    }
    let t = start.elapsed();
    outcome(bad.is_empty() && t < Duration::from_secs(1), format!("{} mismatches {bad:?}, {t:.2?} total", bad.len()))
}

fn localization_at_scale() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_share: f64 = 0.0;
    let mut worst_time = Duration::ZERO;
    let mut errors = Vec::new();
    for i in 0..10 {
        let norm = rng.random_range(0.1..1.0);
        let theta = fixture(i % 2, random_tail(&mut rng, 16, norm));
        let start = Instant::now();
        match localize_zeros(&theta, 400) {
            Ok(rep) => {
                let res = rep.zeros.residuals();
                let total = res.l2_norm * res.l2_norm;
                let share = if total > 0.0 { res.tail_sum_beyond(200) / total } else { 0.0 };
                worst_share = worst_share.max(share);
            }
            Err(e) => errors.push(format!("fixture {i}: {}", e.name())),
        }
        worst_time = worst_time.max(start.elapsed());
    }
    outcome(
        errors.is_empty() && worst_share < 0.05 && worst_time < Duration::from_secs(30),
        format!("max tail share {worst_share:.3e} (< 0.05), slowest {worst_time:.2?}, errors {errors:?}"),
    )
}

fn product_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let theta = fixture(1, random_tail(&mut rng, 8, 0.6));
    let main = theta.main();
    let zeros = localize_zeros(&theta, 4000).unwrap().zeros;
    let zs500 = zeros.truncated(500);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_bound: f64 = 0.0;
    let mut errors = Vec::new();
    let mut count = 0;
    while count < 50 {
        let z = c(rng.random_range(-12.0..12.0), rng.random_range(-2.0..2.0));
        if (z.re - z.re.round()).abs() < 0.05 {
            continue;
        }
        count += 1;
        match product_eval_ratio(main, &zs500, z, 1e-6, None) {
            Ok(p) => {
                let exact = theta.value(z);
                worst_ratio = worst_ratio.max((p.value - exact).norm() / exact.norm());
                worst_bound = worst_bound.max(p.tail_bound);
            }
            Err(e) => errors.push(e.name()),
        }
    }
    let mut worst_hadamard: f64 = 0.0;
    for z in [c(0.25, 0.0), c(-0.3, 0.1), c(0.2, -0.35), c(0.4, 0.0), c(0.1, 0.3)] {
        match product_eval_hadamard(main, &zeros, z, 2000, 3e-4) {
            Ok(h) => {
                let exact = theta.value(z);
                worst_hadamard = worst_hadamard.max((h.value - exact).norm() / exact.norm());
            }
            Err(e) => errors.push(e.name()),
        }
    }
    outcome(
        errors.is_empty() && worst_ratio < 1e-6 && worst_bound <= 1e-6 && worst_hadamard < 3e-4,
        format!(
            "ratio form max rel err {worst_ratio:.2e} (bound {worst_bound:.1e}), Hadamard {worst_hadamard:.2e}, errors {errors:?}"
        ),
    )
}

fn reconstruction_round_trip() -> Outcome {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let tail = random_tail(&mut rng, 20, 0.5);
        let theta = fixture(1, tail.clone());
        let main = theta.main().clone();
        let zeros = localize_zeros(&theta, 140).unwrap().zeros;
        let rec = invert_to_tail(&build_moment_system(&zeros, &main, 32, Some(129)).unwrap()).unwrap();
        let max_err = (-32..=32).map(|k| (rec.tail.coeff(k) - tail.coeff(k)).norm()).fold(0.0, f64::max);
        let partial = ZeroSequence::with_first(&main, 1, zeros.positive()[..129].to_vec()).unwrap();
        let done = complete_zeros(&partial, &main, 32).unwrap();
        let head_err = (done.zeros.head()[0] - zeros.head()[0]).norm();
        (max_err, head_err, rec.tail, done.zeros)
    };
    let (max_err, head_err, tail_a, zeros_a) = run();
    let (_, _, tail_b, zeros_b) = run();
    let deterministic = tail_a == tail_b && zeros_a == zeros_b;
    outcome(
        max_err < 1e-5 && head_err < 1e-6 && deterministic,
        format!("max mode error {max_err:.2e}, head error {head_err:.2e}, deterministic {deterministic}"),
    )
}

fn frame_diagnostic() -> Outcome {
    let mut lattice_gap: f64 = 0.0;
    for power in 0..3 {
        let main = MainPart::monomial_sin(PI, power).unwrap();
        let zs = ZeroSequence::lattice(&main, 65);
        let f = frame_bounds_estimate(&build_moment_system(&zs, &main, 32, Some(65)).unwrap());
        lattice_gap = lattice_gap.max((f.ratio() - 1.0).abs());
    }
    let mut worst_ratio = f64::INFINITY;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let power = (seed % 2) as usize;
        let main = MainPart::monomial_sin(PI, power).unwrap();
        let kappa: Vec<C64> = (0..66)
            .map(|_| C64::from_polar(rng.random_range(0.0..0.1), rng.random_range(0.0..2.0 * PI)))
            .collect();
        let zs = ZeroSequence::from_kappa(&main, main.first_index(), &kappa[..65 + power]).unwrap();
        let f = frame_bounds_estimate(&build_moment_system(&zs, &main, 32, Some(65)).unwrap());
        worst_ratio = worst_ratio.min(f.ratio());
    }
    outcome(
        lattice_gap < 1e-10 && worst_ratio > 0.5,
        format!("lattice |ratio - 1| = {lattice_gap:.1e}, perturbed min m/M = {worst_ratio:.3}"),
    )
}

fn stability_harness() -> Outcome {
    let start = Instant::now();
    let main = MainPart::monomial_sin(PI, 1).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [0.5, 1.0, 2.0] {
        let spec = BallSpec::new(r, 128);
        let small = empirical_lipschitz(&spec, 200, 7, &main, 16).unwrap();
        let big = empirical_lipschitz(&spec, 400, 7, &main, 16).unwrap();
        let finite = small.records.iter().chain(&big.records).all(|rec| rec.ratio.is_finite());
        let complete = small.failures.is_empty() && small.records.len() == 200;
        let drift = (big.c_r_est - small.c_r_est).abs() / small.c_r_est;
        ok &= finite && complete && drift <= 0.25;
        parts.push(format!(
            "r={r}: C_r {:.4} -> {:.4} (drift {:.1}%), failures {}",
            small.c_r_est,
            big.c_r_est,
            100.0 * drift,
            small.failures.len() + big.failures.len()
        ));
    }
    let t = start.elapsed();
    outcome(ok && t < Duration::from_secs(600), format!("{}; {t:.1?}", parts.join("; ")))
}

fn parseval_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_gap: f64 = 0.0;
    let mut worst_slack: f64 = 0.0;
    let mut all_hold = true;
    for _ in 0..20 {
        let m = rng.random_range(1..=16);
        let norm = rng.random_range(0.01..1.0);
        let tail = random_tail(&mut rng, m, norm);
        worst_gap = worst_gap.max(parseval_l2(&tail).unwrap().relative_gap());
        for y in [0.25, 0.5, 1.0] {
            let rep = line_shift_check(&tail, y).unwrap();
            all_hold &= rep.holds;
            worst_slack = worst_slack.max(rep.shifted_norm / rep.bound);
        }
    }
    outcome(
        worst_gap < 1e-4 && all_hold && worst_slack <= 1.0 + 1e-6,
        format!("max Parseval gap {worst_gap:.2e}, max shifted/bound {worst_slack:.4}"),
    )
}

fn sampled_l2_diagnostic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut ok = true;
    let mut worst_decile: f64 = 0.0;
    let mut worst_fill: f64 = 0.0;
    for i in 0..8 {
        let power = i % 3;
        let norm = rng.random_range(0.1..1.0);
        let theta = fixture(power, random_tail(&mut rng, 1 + 2 * i, norm));
        let n_max = 400;
        let shifts: Vec<C64> = (0..=n_max + power as i64)
            .map(|_| C64::from_polar(rng.random_range(0.0..0.3), rng.random_range(0.0..2.0 * PI)))
            .collect();
        let rep = sampled_l2_check(&theta, &shifts, n_max).unwrap();
        let sums = &rep.partial_sums;
        let total = *sums.last().unwrap();
        let cut = sums[sums.len() * 9 / 10 - 1];
        let decile = (total - cut) / total;
        let monotone = sums.windows(2).all(|w| w[1] >= w[0]);
        ok &= rep.holds && monotone && total <= rep.bound && decile < 0.05;
        worst_decile = worst_decile.max(decile);
        worst_fill = worst_fill.max(total / rep.bound);
    }
    outcome(ok, format!("max sum/bound {worst_fill:.3}, max last-decile share {worst_decile:.2e}"))
}

fn sturm_liouville_family() -> Outcome {
    let len = 64;
    let mut ratios = Vec::new();
    for eps in [0.01, 0.1] {
        let modes = [(1, 2.0 * eps)];
        let zs = localize_zeros(&theta_from_u(&modes).unwrap(), 2 * len as i64 + 1).unwrap().zeros;
        let spec = spectrum_from_zeros(&zs);
        let rep = spectral_stability_experiment(&spec, &Spectrum::unperturbed(len), Profile::N1, 16).unwrap();
        ratios.push((eps, rep.ratio, (rep.lhs - series_norm(&modes)).abs() / series_norm(&modes)));
    }
    let finite = ratios.iter().all(|r| r.1.is_finite() && r.1 > 0.0);
    let spread = ratios[0].1.max(ratios[1].1) / ratios[0].1.min(ratios[1].1);
    let big = 100_000;
    let shifted = Spectrum { eigenvalues: (1..=big).map(|n| c((n * n) as f64 + 1.0 / n as f64, 0.0)).collect() };
    let metric_err = (lambda_metric(&shifted, &Spectrum::unperturbed(big), 1) - PI * PI / 90f64.sqrt()).abs();
    outcome(
        finite && spread <= 2.0 && metric_err < 1e-12,
        format!(
            "ratios {:?} (spread {spread:.4}), Lambda_1 error {metric_err:.1e}",
            ratios.iter().map(|r| format!("eps={}: {:.6}", r.0, r.1)).collect::<Vec<_>>()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 counting exactness", counting_exactness),
        ("2 localization at n_max = 400", localization_at_scale),
        ("3 product representations", product_equivalence),
        ("4 reconstruction round trip", reconstruction_round_trip),
        ("5 frame diagnostic", frame_diagnostic),
        ("6 stability harness", stability_harness),
        ("7 Parseval and line shift", parseval_consistency),
        ("8 sampled l2 bound", sampled_l2_diagnostic),
        ("9 Sturm-Liouville family", sturm_liouville_family),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        let tag = if out.passed { "PASS" } else { "FAIL" };
        println!("criterion {name}: {tag} ({}) [{:.2?}]", out.detail, start.elapsed());
        if !out.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
