use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::MainPart;
use crate::zeros::ZeroSequence;
use crate::{Error, Result, C64};

/// Ball ‖ϰ‖ ≤ r in the weighted residual metric, sampled up to `n_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallSpec {
    pub r: f64,
    pub n_max: i64,
    /// Envelope |ϰ_n| ≤ (n + N)^{−decay_exponent}.
    pub decay_exponent: f64,
}

impl BallSpec {
    pub fn new(r: f64, n_max: i64) -> Self {
        BallSpec { r, n_max, decay_exponent: 1.0 }
    }
}

/// Random sequence z_n = z_n⁰ + ϰ_n/μ_nᴺ for n = 1−N..=n_max with
/// ‖ϰ‖ = r·u, u uniform in (0, 1]. Head indices are perturbed as well.
pub fn sample_ball(main: &MainPart, spec: &BallSpec, seed: u64) -> Result<ZeroSequence> {
    if !(spec.r >= 0.0) || !spec.r.is_finite() {
        return Err(Error::InvalidInput(format!("ball radius must be nonnegative, got {}", spec.r)));
    }
    if spec.n_max < 1 {
        return Err(Error::InvalidInput(format!("n_max must be at least 1, got {}", spec.n_max)));
    }
    if !(spec.decay_exponent >= 0.5) {
        return Err(Error::InvalidInput(format!("decay exponent must be at least 0.5, got {}", spec.decay_exponent)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = main.first_index();
    let shift = main.degree() as f64;
    let mut kappa: Vec<C64> = (first..=spec.n_max)
        .map(|n| {
            let env = (n as f64 + shift).powf(-spec.decay_exponent);
            let mag = rng.random::<f64>() * env;
            C64::from_polar(mag, 2.0 * PI * rng.random::<f64>())
        })
        .collect();
    let u = 1.0 - rng.random::<f64>();
    let norm = kappa.iter().map(|k| k.norm_sqr()).sum::<f64>().sqrt();
    let scale = if norm > 0.0 { spec.r * u / norm } else { 0.0 };
    for k in &mut kappa {
        *k *= scale;
    }
    ZeroSequence::from_kappa(main, first, &kappa)
}
