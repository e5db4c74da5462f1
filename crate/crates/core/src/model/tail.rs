use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::{Error, Result, C64};

/// w(x) = Σ_{|k|≤M} c_k e^{iπkx/b} on (−b, b).
///
/// Storing modes instead of samples makes the transform
/// F(z) = ∫₋ᵦᵇ w(x)e^{izx}dx and all moment integrals closed-form.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTail {
    b: f64,
    m: usize,
    coeffs: Vec<C64>,
}

impl FourierTail {
    pub fn zero(b: f64, m: usize) -> Self {
        FourierTail { b, m, coeffs: vec![C64::new(0.0, 0.0); 2 * m + 1] }
    }

    pub fn from_modes<I>(b: f64, m: usize, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, C64)>,
    {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidInput(format!("tail type must be positive, got {b}")));
        }
        let mut tail = FourierTail::zero(b, m);
        for (k, c) in modes {
            if k.unsigned_abs() as usize > m {
                return Err(Error::InvalidInput(format!("mode {k} exceeds cutoff M = {m}")));
            }
            tail.coeffs[(k + m as i64) as usize] += c;
        }
        Ok(tail)
    }

    /// Coefficients ordered k = −M..=M.
    pub fn from_coeffs(b: f64, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidInput("coefficient vector must have odd length 2M+1".into()));
        }
        let m = coeffs.len() / 2;
        let mut tail = FourierTail::zero(b, m);
        tail.coeffs = coeffs;
        Ok(tail)
    }

    pub fn type_b(&self) -> f64 {
        self.b
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> C64 {
        if k.unsigned_abs() as usize > self.m {
            return C64::new(0.0, 0.0);
        }
        self.coeffs[(k + self.m as i64) as usize]
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let m = self.m as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - m, *c))
    }

    /// Nonzero modes keyed by k.
    pub fn mode_map(&self) -> BTreeMap<i64, C64> {
        self.modes().filter(|(_, c)| c.norm() != 0.0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// ‖w‖²_{L₂(−b,b)} = 2b Σ|c_k|².
    pub fn norm_sq(&self) -> f64 {
        2.0 * self.b * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Largest |πk/b| over nonzero modes: the poles of F(z)/sin(bz).
    pub fn pole_radius(&self) -> f64 {
        self.modes()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, _)| (PI * k as f64 / self.b).abs())
            .fold(0.0, f64::max)
    }

    /// w(x) for x in (−b, b).
    pub fn value_at(&self, x: f64) -> C64 {
        self.modes()
            .map(|(k, c)| c * C64::new(0.0, PI * k as f64 * x / self.b).exp())
            .sum()
    }

    /// Difference `self − other` on the larger cutoff.
    pub fn sub(&self, other: &FourierTail) -> Result<FourierTail> {
        if (self.b - other.b).abs() > 1e-14 * self.b {
            return Err(Error::InvalidInput("tails have different exponential types".into()));
        }
        let m = self.m.max(other.m);
        FourierTail::from_modes(
            self.b,
            m,
            self.modes().chain(other.modes().map(|(k, c)| (k, -c))),
        )
    }

    pub fn scaled(&self, s: f64) -> FourierTail {
        FourierTail { b: self.b, m: self.m, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// d^ν/dz^ν ∫₋ᵦᵇ w(x)e^{izx}dx, exact for every ν.
    pub fn eval(&self, z: C64, order: usize) -> C64 {
        let (ep, em) = phases(self.b, z);
        self.modes()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, c)| c * mode_transform_with(self.b, k, z, order, ep, em))
            .sum()
    }
}

fn phases(b: f64, z: C64) -> (C64, C64) {
    let (sign, d) = super::base::reduce_to_cell(b, z);
    let ibz = C64::new(0.0, b) * d;
    (ibz.exp() * sign, (-ibz).exp() * sign)
}

/// ∫₋ᵦᵇ e^{iπkx/b} (ix)^ν e^{izx} dx, the ν-th z-derivative of
/// 2(−1)^k sin(bz)/(z + πk/b).
pub fn mode_transform(b: f64, k: i64, z: C64, order: usize) -> C64 {
    let (ep, em) = phases(b, z);
    mode_transform_with(b, k, z, order, ep, em)
}

pub(crate) fn mode_transform_with(b: f64, k: i64, z: C64, order: usize, ep: C64, em: C64) -> C64 {
    let zeta = z + PI * k as f64 / b;
    let i_pow = C64::i().powu(order as u32);
    if (zeta * b).norm() < order as f64 + 2.0 {
        return i_pow * moment_series(b, zeta, order);
    }
    // e^{±ibζ} = (−1)^k e^{±ibz}; avoids the rounding of bz + πk
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let (ep, em) = (ep * sign, em * sign);
    let iz = C64::i() * zeta;
    // J_ν = ∫ x^ν e^{iζx} dx by integration by parts
    let mut j = (ep - em) / iz;
    let mut bp = 1.0;
    for m in 1..=order {
        bp *= b;
        let neg = if m % 2 == 0 { bp } else { -bp };
        j = (ep * bp - em * neg) / iz - j * (m as f64) / iz;
    }
    i_pow * j
}

/// ∫₋ᵦᵇ x^ν e^{iζx} dx by its Taylor series in ζ (used for |bζ| small).
fn moment_series(b: f64, zeta: C64, order: usize) -> C64 {
    let ibz = C64::i() * zeta * b;
    let scale = b.powi(order as i32 + 1);
    let mut t = C64::new(scale, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for m in 0..400usize {
        let p = order + m;
        if p % 2 == 0 {
            sum += t * (2.0 / (p as f64 + 1.0));
        }
        if m >= 2 && t.norm() <= 1e-18 * sum.norm().max(scale) {
            break;
        }
        t = t * ibz / (m as f64 + 1.0);
    }
    sum
}
