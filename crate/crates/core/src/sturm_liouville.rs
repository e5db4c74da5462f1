//! Characteristic functions of Sturm–Liouville problems written in the
//! form θ = P_N·sin(πz) + F[w] with b = π.
//!
//! Two profiles are supported:
//!
//! * `N1`: θ(z) = z·sin(πz) + ∫₀^π u(x)cos(zx)dx for a mean-zero
//!   u ∈ L₂(0, π). The tail is the even extension w(x) = u(|x|)/2, so a
//!   cosine coefficient a_k of u gives c_k = c_{−k} = a_k/4.
//! * `N0`: θ(z) = sin(πz) + ∫₀^π v(x)sin(zx)dx. The tail is the odd
//!   extension of v/(2i), so a sine coefficient b_k of v gives
//!   c_k = −b_k/4 and c_{−k} = b_k/4.
//!
//! In both cases ‖u‖ (resp. ‖v‖) in L₂(0, π) equals √2·‖w‖ in L₂(−π, π).
//! Eigenvalues are λ_n = z², taken from the zeros z_{2n} = √λ_n,
//! z_{2n+1} = −√λ_n; the zeros at the origin form the head.

use std::f64::consts::PI;

use crate::model::{FourierTail, MainPart, ThetaFunction};
use crate::stability::stability_ratio;
use crate::zeros::ZeroSequence;
use crate::{Error, Result, C64};

const CUT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Profile {
    /// P(z) = z, tail from a cosine series of u.
    N1,
    /// P(z) = 1, tail from a sine series of v.
    N0,
}

impl Profile {
    pub fn degree(self) -> usize {
        match self {
            Profile::N1 => 1,
            Profile::N0 => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::N1 => "N1",
            Profile::N0 => "N0",
        }
    }

    pub fn main(self) -> MainPart {
        MainPart::monomial_sin(PI, self.degree()).expect("b = π is valid")
    }
}

/// θ for the cosine coefficients `(k, a_k)` of u.
pub fn theta_from_u(u_modes: &[(usize, f64)]) -> Result<ThetaFunction> {
    if let Some((_, a0)) = u_modes.iter().find(|(k, a)| *k == 0 && *a != 0.0) {
        return Err(Error::InvalidInput(format!("u must have zero mean, got constant term {a0}")));
    }
    let m = u_modes.iter().map(|(k, _)| *k).max().unwrap_or(0);
    let mut coeffs = vec![C64::new(0.0, 0.0); 2 * m + 1];
    for &(k, a) in u_modes.iter().filter(|(k, _)| *k > 0) {
        coeffs[m + k] += a / 4.0;
        coeffs[m - k] += a / 4.0;
    }
    ThetaFunction::new(Profile::N1.main(), FourierTail::from_coeffs(PI, coeffs)?)
}

/// θ for the sine coefficients `(k, b_k)` of v. The k = 0 term vanishes.
pub fn theta_from_v(v_modes: &[(usize, f64)]) -> Result<ThetaFunction> {
    let m = v_modes.iter().map(|(k, _)| *k).max().unwrap_or(0);
    let mut coeffs = vec![C64::new(0.0, 0.0); 2 * m + 1];
    for &(k, b) in v_modes.iter().filter(|(k, _)| *k > 0) {
        coeffs[m + k] -= b / 4.0;
        coeffs[m - k] += b / 4.0;
    }
    ThetaFunction::new(Profile::N0.main(), FourierTail::from_coeffs(PI, coeffs)?)
}

/// θ for a series of the kind the profile expects.
pub fn theta_from_series(profile: Profile, modes: &[(usize, f64)]) -> Result<ThetaFunction> {
    match profile {
        Profile::N1 => theta_from_u(modes),
        Profile::N0 => theta_from_v(modes),
    }
}

/// ‖u‖ in L₂(0, π) for a cosine or sine series.
pub fn series_norm(modes: &[(usize, f64)]) -> f64 {
    (PI / 2.0 * modes.iter().filter(|(k, _)| *k > 0).map(|(_, a)| a * a).sum::<f64>()).sqrt()
}

/// Eigenvalues λ_1, λ_2, … .
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
}

impl Spectrum {
    /// λ_n = n², n = 1..=len.
    pub fn unperturbed(len: usize) -> Self {
        Spectrum { eigenvalues: (1..=len).map(|n| C64::new((n * n) as f64, 0.0)).collect() }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Principal square root. A point exactly on the negative axis maps to
/// the +i side; a point just below the axis would flip to the −i side and
/// is rejected.
fn branch_sqrt(index: usize, lambda: C64) -> Result<C64> {
    if lambda.re < 0.0 && lambda.im == 0.0 {
        return Ok(C64::new(0.0, (-lambda.re).sqrt()));
    }
    if lambda.re < 0.0 && lambda.im < 0.0 && lambda.im > -CUT_TOL {
        return Err(Error::BranchAmbiguity { index, value: lambda.to_string() });
    }
    Ok(lambda.sqrt())
}

/// Zeros z_{1−N}..z_{2L+1} of θ for a spectrum of length L.
pub fn spectrum_to_zeros(spec: &Spectrum, profile: Profile) -> Result<ZeroSequence> {
    let mut zs = vec![C64::new(0.0, 0.0); profile.degree() + 1];
    for (i, &lambda) in spec.eigenvalues.iter().enumerate() {
        let r = branch_sqrt(i + 1, lambda)?;
        zs.push(r);
        zs.push(-r);
    }
    Ok(ZeroSequence::new(&profile.main(), zs))
}

/// λ_n = z_{2n}² for every complete pair in the sequence.
pub fn spectrum_from_zeros(zeros: &ZeroSequence) -> Spectrum {
    let pairs = (zeros.last() - 1).max(0) / 2;
    Spectrum { eigenvalues: (1..=pairs).map(|n| zeros.get(2 * n).expect("index in range").powu(2)).collect() }
}

/// Λ_j(λ, λ̃) = ‖{(λ_n − λ̃_n)/n^j}‖ over the common length.
pub fn lambda_metric(a: &Spectrum, b: &Spectrum, j: u32) -> f64 {
    a.eigenvalues
        .iter()
        .zip(&b.eigenvalues)
        .enumerate()
        .map(|(i, (x, y))| ((x - y) / ((i + 1) as f64).powi(j as i32)).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralStabilityReport {
    /// ‖û‖ (profile N1) or ‖v̂‖ (profile N0) in L₂(0, π).
    pub lhs: f64,
    /// Λ₀ (profile N1) or Λ₁ (profile N0) of the two spectra.
    pub rhs: f64,
    pub ratio: f64,
    /// z-plane distance ‖{μ_nᴺ ẑ_n}‖.
    pub zero_distance: f64,
}

/// Recovers both tails from the spectra and compares the potentials with
/// the spectral distance.
pub fn spectral_stability_experiment(spec_a: &Spectrum, spec_b: &Spectrum, profile: Profile, m: usize) -> Result<SpectralStabilityReport> {
    if spec_a.len() != spec_b.len() {
        return Err(Error::InvalidInput("spectra must have the same length".into()));
    }
    let main = profile.main();
    let za = spectrum_to_zeros(spec_a, profile)?;
    let zb = spectrum_to_zeros(spec_b, profile)?;
    let rhs = match profile {
        Profile::N1 => lambda_metric(spec_a, spec_b, 0),
        Profile::N0 => lambda_metric(spec_a, spec_b, 1),
    };
    let (lhs, zero_distance) = match stability_ratio(&za, &zb, &main, m)? {
        Some(rec) => (2f64.sqrt() * rec.numerator, rec.denominator),
        None => (0.0, 0.0),
    };
    let ratio = if rhs > 0.0 { lhs / rhs } else { f64::NAN };
    Ok(SpectralStabilityReport { lhs, rhs, ratio, zero_distance })
}
