use crate::model::MainPart;
use crate::zeros::ZeroSequence;
use crate::{Error, Result, C64};

const POLE_TOL: f64 = 1e-12;
const EXPLICIT_FACTOR: i64 = 16;

/// Value of the ratio product with the bound on the neglected factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioEval {
    pub value: C64,
    /// Bound on |∏_{n>n_max}(z_n − z)/(z_n⁰ − z) − 1|.
    pub tail_bound: f64,
    /// ‖ϰ‖ assumed for the indices beyond the sequence.
    pub tail_norm: f64,
}

/// S(z)·∏_{n=1−N}^{n_max} (z_n − z)/(z_n⁰ − z).
///
/// The neglected factor satisfies |log| ≤ t/(1 − t) with
/// t = ‖ϰ_tail‖·(Σ_{n>n_max} |μ_nᴺ(z_n⁰ − z)|⁻²)^{1/2}. When `tail_norm` is
/// `None`, ‖ϰ_tail‖ is estimated by the ℓ₂ norm of ϰ over the last half of
/// the known zeros.
pub fn product_eval_ratio(
    main: &MainPart,
    zeros: &ZeroSequence,
    z: C64,
    tail_tol: f64,
    tail_norm: Option<f64>,
) -> Result<RatioEval> {
    check_full(main, zeros)?;
    let n_max = zeros.last();
    let mut prod = C64::new(1.0, 0.0);
    for (i, zn) in zeros.zeros().iter().enumerate() {
        let z0 = zeros.lattice_points()[i];
        let den = z0 - z;
        if den.norm() < POLE_TOL * z.norm().max(1.0) {
            return Err(Error::NearLatticePole(den.norm()));
        }
        prod *= (zn - z) / den;
    }
    let value = main.eval_unchecked(z, 0) * prod;

    let tail_norm = match tail_norm {
        Some(t) => t,
        None => {
            let r = zeros.residuals();
            let mid = zeros.first() + (zeros.len() as i64) / 2;
            r.tail_sum_beyond(mid - 1).sqrt()
        }
    };
    let s2 = inverse_weight_tail(main, n_max, z)?;
    let t = tail_norm * s2.sqrt();
    let tail_bound = if t < 1.0 { (t / (1.0 - t)).exp() - 1.0 } else { f64::INFINITY };
    if !(tail_bound < tail_tol) {
        return Err(Error::TailBoundExceeded { bound: tail_bound, tol: tail_tol });
    }
    Ok(RatioEval { value, tail_bound, tail_norm })
}

/// Σ_{n>n_max} |μ_nᴺ(z_n⁰ − z)|⁻²: explicit up to 16·n_max, then an
/// integral bound for the rest of the lattice.
fn inverse_weight_tail(main: &MainPart, n_max: i64, z: C64) -> Result<f64> {
    let n = main.degree() as i32;
    let last = EXPLICIT_FACTOR * n_max.max(1);
    let mut sum = 0.0;
    for k in n_max + 1..=last {
        let z0 = main.lattice_zero_unchecked(k);
        let d = (z0 - z).norm();
        if d < POLE_TOL * z.norm().max(1.0) {
            return Err(Error::NearLatticePole(d));
        }
        let mu = crate::model::mu_of(z0).norm();
        sum += 1.0 / (mu.powi(2 * n) * d * d);
    }
    let sep = main.separation();
    let reach = main.lattice_zero_unchecked(last).norm().min(main.lattice_zero_unchecked(last - 1).norm());
    let gap = reach - z.norm();
    if gap <= sep {
        return Ok(f64::INFINITY);
    }
    // two points per step of `sep` beyond `reach`
    sum += 2.0 / reach.powi(2 * n) * (1.0 / (gap * gap) + 1.0 / (sep * gap));
    Ok(sum)
}

fn check_full(main: &MainPart, zeros: &ZeroSequence) -> Result<()> {
    if zeros.first() != main.first_index() {
        return Err(Error::InvalidInput(format!(
            "product needs zeros from index {}, sequence starts at {}",
            main.first_index(),
            zeros.first()
        )));
    }
    if zeros.degree() != main.degree() {
        return Err(Error::InvalidInput("zero sequence belongs to a different main part".into()));
    }
    Ok(())
}

/// Hadamard product at two truncation levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HadamardEval {
    /// Value truncated at 2·n_max.
    pub value: C64,
    /// Value truncated at n_max.
    pub coarse: C64,
    /// |value − coarse| / |value|.
    pub cauchy_diff: f64,
}

/// α·e^{βz}·∏_{n=1−N}^{n_max} ((z_n − z)/μ_n)·e^{z/μ_n} with α, β taken from
/// the main part. Convergence is monitored against the truncation at
/// 2·n_max, which therefore has to be available in `zeros`.
pub fn product_eval_hadamard(
    main: &MainPart,
    zeros: &ZeroSequence,
    z: C64,
    n_max: i64,
    tol: f64,
) -> Result<HadamardEval> {
    check_full(main, zeros)?;
    if n_max < 1 {
        return Err(Error::InvalidInput(format!("n_max must be at least 1, got {n_max}")));
    }
    if zeros.last() < 2 * n_max {
        return Err(Error::InsufficientZeros { needed: (2 * n_max - main.first_index() + 1) as usize, got: zeros.len() });
    }
    let lead = main.leading_data();
    let mut acc = lead.alpha * (z * lead.beta).exp();
    let mut coarse = C64::new(0.0, 0.0);
    for (n, zn) in zeros.iter() {
        if n > 2 * n_max {
            break;
        }
        let mu = crate::model::mu_of(zeros.lattice_at(n).expect("index in range"));
        acc *= (zn - z) / mu * (z / mu).exp();
        if n == n_max {
            coarse = acc;
        }
    }
    let scale = acc.norm();
    let cauchy_diff = if scale > 0.0 { (acc - coarse).norm() / scale } else { (acc - coarse).norm() };
    if !(cauchy_diff <= tol) {
        return Err(Error::SlowConvergence { diff: cauchy_diff, tol });
    }
    Ok(HadamardEval { value: acc, coarse, cauchy_diff })
}
