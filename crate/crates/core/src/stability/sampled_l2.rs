use nalgebra::DMatrix;

use crate::model::{mode_transform, ThetaFunction};
use crate::{Error, Result, C64};

/// Sampled ℓ₂ sums of f = θ − S at shifted lattice points.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledL2Report {
    /// Σ_{k ≤ n}|f(z_k⁰ + α_k)|² for n = 1−N..=n_max.
    pub partial_sums: Vec<f64>,
    /// C·(2b·M_frame)·e^{b²}‖w‖² with C = sup e^{|α_n|²}.
    pub bound: f64,
    /// Squared top singular value of the sampling matrix scaled by 1/(2b).
    pub m_frame: f64,
    pub holds: bool,
}

/// Evaluates the sums for shifts α_n (`shifts[i]` belongs to n = 1 − N + i).
pub fn sampled_l2_check(theta: &ThetaFunction, shifts: &[C64], n_max: i64) -> Result<SampledL2Report> {
    let main = theta.main();
    let first = main.first_index();
    let count = (n_max - first + 1).max(0) as usize;
    if shifts.len() < count {
        return Err(Error::InvalidInput(format!("need {count} shifts, got {}", shifts.len())));
    }
    let tail = theta.tail();
    let b = main.type_b();
    let m = tail.cutoff() as i64;
    let nodes: Vec<C64> = (first..=n_max).zip(shifts).map(|(n, a)| main.lattice_zero_unchecked(n) + a).collect();
    let mut acc = 0.0;
    let partial_sums: Vec<f64> = nodes
        .iter()
        .map(|&z| {
            acc += theta.tail_part(z).norm_sqr();
            acc
        })
        .collect();
    let a = DMatrix::from_fn(nodes.len(), (2 * m + 1) as usize, |r, c| mode_transform(b, c as i64 - m, nodes[r], 0) / (2.0 * b));
    let sv_max = a.singular_values().iter().copied().fold(0.0, f64::max);
    let m_frame = sv_max * sv_max;
    let c = shifts[..count].iter().map(|s| s.norm_sqr().exp()).fold(1.0, f64::max);
    let bound = c * 2.0 * b * m_frame * (b * b).exp() * tail.norm_sq();
    let total = partial_sums.last().copied().unwrap_or(0.0);
    let monotone = partial_sums.windows(2).all(|w| w[1] >= w[0]);
    Ok(SampledL2Report { partial_sums, bound, m_frame, holds: monotone && total <= bound * (1.0 + 1e-12) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FourierTail, MainPart};
    use crate::reconstruction::{build_moment_system, frame_bounds_estimate};
    use crate::zeros::ZeroSequence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn theta(seed: u64, m: usize) -> ThetaFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tail = FourierTail::from_modes(
            PI,
            m,
            (-(m as i64)..=m as i64).map(|k| (k, c(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1)))),
        )
        .unwrap();
        ThetaFunction::new(MainPart::monomial_sin(PI, 1).unwrap(), tail).unwrap()
    }

    #[test]
    fn zero_tail_gives_zero_sums() {
        let t = ThetaFunction::new(MainPart::monomial_sin(PI, 1).unwrap(), FourierTail::zero(PI, 2)).unwrap();
        let r = sampled_l2_check(&t, &vec![c(0.2, 0.0); 60], 50).unwrap();
        assert!(r.partial_sums.iter().all(|s| *s == 0.0));
        assert!(r.holds);
    }

    #[test]
    fn unshifted_sums_match_moment_rows() {
        let t = theta(1, 4);
        let n_max = 60;
        let r = sampled_l2_check(&t, &vec![c(0.0, 0.0); 61], n_max).unwrap();
        // oracle: f(z_n⁰) = −(right-hand side) of the lattice moment system, rows n ≥ 1
        let main = t.main();
        let lattice = ZeroSequence::lattice(main, n_max);
        let sys = build_moment_system(&lattice, main, 4, None).unwrap();
        let c_vec = nalgebra::DVector::from_iterator(9, t.tail().coeffs().iter().copied());
        let rows = sys.matrix() * c_vec;
        let from_rows: f64 = rows.iter().map(|v| v.norm_sqr()).sum();
        let from_sums = r.partial_sums.last().unwrap() - r.partial_sums[0];
        assert!((from_rows - from_sums).abs() < 1e-10 * from_rows);
        let f = frame_bounds_estimate(&sys);
        assert!(from_rows <= f.big_m_est * 2.0 * PI * t.tail().norm_sq() * (1.0 + 1e-10));
        assert!(r.holds);
    }

    #[test]
    fn alternating_shifts_are_cauchy() {
        let t = theta(2, 8);
        let shifts: Vec<C64> = (0..=400).map(|n| c(0.3 * if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        let r = sampled_l2_check(&t, &shifts, 399).unwrap();
        assert!(r.holds);
        let total = *r.partial_sums.last().unwrap();
        let decile = r.partial_sums[r.partial_sums.len() * 9 / 10];
        assert!((total - decile) < 0.05 * total);
    }
}
