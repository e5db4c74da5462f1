use crate::model::{FourierTail, MainPart, Polynomial, ThetaFunction};
use crate::zeros::ZeroSequence;
use crate::{Error, Result, C64};

use super::complete::complete_zeros;
use super::moments::{build_moment_system, invert_to_tail};

const Y0: f64 = 1.0;
const GROWTH_LIMIT: f64 = 2.0;

/// Decomposition θ_arb = S + P_{N−1}·S₀ + F[w̃] for a product built with
/// an arbitrary head.
#[derive(Clone, Debug)]
pub struct HeadCorrection {
    /// P_{N−1}, of degree below N.
    pub poly: Polynomial,
    pub tail: FourierTail,
    /// Relative least-squares residual of the tail fit.
    pub fit_residual: f64,
    /// Head z_{1−N}..z_0 of the function determined by the given zeros.
    pub true_head: Vec<C64>,
    /// Samples (y, |g(iy) − P_{N−1}(iy)| / (1 + |P_{N−1}(iy)|)) of the
    /// imaginary-axis remainder.
    pub axis_residuals: Vec<(f64, f64)>,
}

/// Replaces the head of the sequence determined by `partial` with
/// `arbitrary_head` and splits the resulting product into main part,
/// polynomial correction and tail.
///
/// With H and H̃ the monic polynomials of the true and the arbitrary head,
/// θ_arb = θ·H̃/H. Dividing P_N·H̃ by H gives the quotient P_N + P_{N−1};
/// the remainder term is fitted by the moment system of the new main part.
pub fn head_correction(arbitrary_head: &[C64], partial: &ZeroSequence, main: &MainPart, m: usize) -> Result<HeadCorrection> {
    let n = main.degree();
    if arbitrary_head.len() != n {
        return Err(Error::InvalidInput(format!("head needs {n} zeros, got {}", arbitrary_head.len())));
    }
    let done = complete_zeros(partial, main, m)?;
    let true_head = done.zeros.head().to_vec();
    let one = C64::new(1.0, 0.0);
    let h = Polynomial::from_roots(&true_head, one);
    let h_arb = Polynomial::from_roots(arbitrary_head, one);
    let (q, _) = main.poly().mul(&h_arb).div_rem(&h)?;
    let poly = q.sub(main.poly());

    let theta = &done.theta;
    let theta_arb = |z: C64| theta.value(z) * h_arb.eval(z) / h.eval(z);
    let base = main.base();
    let axis_residuals: Vec<(f64, f64)> = (0..n + 3)
        .map(|j| {
            let y = Y0 * 2f64.powi(j as i32);
            let z = C64::new(0.0, y);
            let g = (theta_arb(z) - main.eval_unchecked(z, 0)) / base.eval_unchecked(z, 0);
            let p = poly.eval(z);
            (y, (g - p).norm() / (1.0 + p.norm()))
        })
        .collect();
    if let (Some(first), Some(last)) = (axis_residuals.first(), axis_residuals.last()) {
        if last.1 > GROWTH_LIMIT * first.1 && last.1 > 1e-8 {
            return Err(Error::FitDiverged(format!(
                "remainder grows along the imaginary axis: {:.3e} at y = {} vs {:.3e} at y = {}",
                last.1, last.0, first.1, first.0
            )));
        }
    }

    let new_main = MainPart::new(base.clone(), main.poly().add(&poly))?;
    let partial_new = ZeroSequence::with_first(&new_main, 1, partial.zeros().to_vec())?;
    let sys = build_moment_system(&partial_new, &new_main, m, None)?;
    let rec = invert_to_tail(&sys)?;
    let fit_residual = if rec.rhs_norm > 0.0 { rec.residual_norm / rec.rhs_norm } else { rec.residual_norm };
    let _ = ThetaFunction::new(new_main, rec.tail.clone())?;
    Ok(HeadCorrection { poly, tail: rec.tail, fit_residual, true_head, axis_residuals })
}
