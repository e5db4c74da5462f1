use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result, C64};

use super::MAX_DERIV;

/// User supplied sine-type function.
///
/// Implementors provide the exponential type, the evaluator up to the second
/// derivative and the enumerated zero lattice. The lattice is never inferred
/// from the evaluator.
pub trait CustomBase: Send + Sync + fmt::Debug {
    fn type_b(&self) -> f64;
    /// `order`-th derivative at `z`, `order <= 2`.
    fn eval(&self, z: C64, order: usize) -> C64;
    /// Zero number `n >= 1`.
    fn zero(&self, n: usize) -> C64;
    /// Asymptotic separation of distinct zeros.
    fn separation(&self) -> f64;
}

/// The sine-type factor S₀ of the main part.
#[derive(Clone, Debug)]
pub enum SineTypeBase {
    /// S₀(z) = sin(bz), zeros kπ/b.
    SinScaled { b: f64 },
    Custom(Arc<dyn CustomBase>),
}

impl SineTypeBase {
    pub fn sin_scaled(b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidInput(format!("exponential type must be positive, got {b}")));
        }
        Ok(SineTypeBase::SinScaled { b })
    }

    pub fn type_b(&self) -> f64 {
        match self {
            SineTypeBase::SinScaled { b } => *b,
            SineTypeBase::Custom(c) => c.type_b(),
        }
    }

    pub fn separation(&self) -> f64 {
        match self {
            SineTypeBase::SinScaled { b } => PI / b,
            SineTypeBase::Custom(c) => c.separation(),
        }
    }

    pub fn is_sin_scaled(&self) -> bool {
        matches!(self, SineTypeBase::SinScaled { .. })
    }

    /// S₀^{(ν)}(z) for ν ≤ 2.
    pub fn eval(&self, z: C64, order: usize) -> Result<C64> {
        if order > MAX_DERIV {
            return Err(Error::UnsupportedDerivOrder(order));
        }
        Ok(self.eval_unchecked(z, order))
    }

    pub(crate) fn eval_unchecked(&self, z: C64, order: usize) -> C64 {
        match self {
            SineTypeBase::SinScaled { b } => {
                // sin(bz) = (−1)^k sin(b(z − kπ/b)) with k the nearest lattice integer
                let (sign, d) = reduce_to_cell(*b, z);
                let bz = d * *b;
                // d^ν/dz^ν sin(bz) = b^ν sin(bz + νπ/2)
                let scale = sign * b.powi(order as i32);
                match order % 4 {
                    0 => bz.sin() * scale,
                    1 => bz.cos() * scale,
                    2 => -bz.sin() * scale,
                    _ => -bz.cos() * scale,
                }
            }
            SineTypeBase::Custom(c) => c.eval(z, order),
        }
    }

    /// Lattice zero z_n⁰ for `n >= 1`.
    ///
    /// For `SinScaled` the two-sided lattice is enumerated by modulus,
    /// positive first: z₁⁰ = 0, z_{2k}⁰ = kπ/b, z_{2k+1}⁰ = −kπ/b.
    pub fn zero(&self, n: usize) -> Result<C64> {
        if n == 0 {
            return Err(Error::IndexOutOfRange { index: 0, first: 1 });
        }
        Ok(self.zero_unchecked(n))
    }

    pub(crate) fn zero_unchecked(&self, n: usize) -> C64 {
        match self {
            SineTypeBase::SinScaled { b } => {
                let k = (n / 2) as f64;
                let sep = PI / b;
                let x = if n == 1 {
                    0.0
                } else if n % 2 == 0 {
                    k * sep
                } else {
                    -k * sep
                };
                C64::new(x, 0.0)
            }
            SineTypeBase::Custom(c) => c.zero(n),
        }
    }

    /// Multiplicity of z = 0 among the base zeros (0 or 1 for separated lattices).
    pub fn zero_multiplicity_at_origin(&self, upto: usize) -> usize {
        (1..=upto).filter(|&n| self.zero_unchecked(n).norm() == 0.0).count()
    }
}

/// Splits z = kπ/b + d with k the nearest integer, returns ((−1)^k, d).
pub(crate) fn reduce_to_cell(b: f64, z: C64) -> (f64, C64) {
    let sep = PI / b;
    let k = (z.re / sep).round();
    if !k.is_finite() || k.abs() > 1e15 {
        return (1.0, z);
    }
    let sign = if k.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
    (sign, z - k * sep)
}

/// Horizontal sampling grid used by [`SineTypeBase::verify_sine_type`].
#[derive(Clone, Copy, Debug)]
pub struct SampleGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid { x_min: -50.0, x_max: 50.0, count: 2001 }
    }
}

/// Sampled two-sided bound c ≤ |S₀(z)|e^{−b|Im z|} ≤ C.
#[derive(Clone, Copy, Debug)]
pub struct SineTypeEstimate {
    pub c_est: f64,
    pub upper_est: f64,
    /// Lower estimate collapsed relative to the upper one.
    pub flagged: bool,
}

const FLAG_RATIO: f64 = 1e-6;

impl SineTypeBase {
    /// Samples |S₀(z)|e^{−b|Im z|} on the lines Im z = ±k_check.
    pub fn verify_sine_type(&self, k_check: f64, grid: SampleGrid) -> Result<SineTypeEstimate> {
        if !(k_check > 0.0) {
            return Err(Error::InvalidInput("K_check must be positive".into()));
        }
        if grid.count < 2 || !(grid.x_max > grid.x_min) {
            return Err(Error::InvalidInput("sample grid is empty".into()));
        }
        let b = self.type_b();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let step = (grid.x_max - grid.x_min) / (grid.count - 1) as f64;
        for i in 0..grid.count {
            let x = grid.x_min + step * i as f64;
            for y in [k_check, -k_check] {
                let v = self.eval_unchecked(C64::new(x, y), 0).norm() * (-b * y.abs()).exp();
                let v = if v.is_finite() { v } else { 0.0 };
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        Ok(SineTypeEstimate { c_est: lo, upper_est: hi, flagged: !(lo > FLAG_RATIO * hi) })
    }
}
