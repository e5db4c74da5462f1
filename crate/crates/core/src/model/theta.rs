use std::f64::consts::PI;

use crate::{Error, Result, C64};

use super::{FourierTail, Polynomial, SineTypeBase, MAX_DERIV};

/// Hadamard leading data of S at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadingData {
    /// Multiplicity of z = 0 as a zero of S.
    pub s: usize,
    /// lim_{z→0} S(z)/z^s.
    pub alpha: C64,
    /// lim_{z→0} d/dz ln(S(z)/z^s).
    pub gamma: C64,
    /// s + γ.
    pub beta: C64,
}

/// S(z) = P_N(z)·S₀(z) together with its indexed zero lattice.
///
/// Lattice indices run over n ≥ 1 − N: the polynomial zeros occupy
/// n = 1−N..=0 (sorted by modulus), the base zeros n ≥ 1.
#[derive(Clone, Debug)]
pub struct MainPart {
    base: SineTypeBase,
    poly: Polynomial,
    poly_zeros: Vec<C64>,
    leading: LeadingData,
}

/// Lattice points closer to 0 than this fraction of the separation count
/// as sitting at the origin when choosing the Taylor circle.
const ORIGIN_CLUSTER: f64 = 1e-6;
const TAYLOR_NODES: usize = 256;
const MULTIPLICITY_TOL: f64 = 1e-10;

impl MainPart {
    pub fn new(base: SineTypeBase, poly: Polynomial) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::DegenerateMainPart("polynomial factor is identically zero".into()));
        }
        let poly_zeros = poly.roots()?;
        let scale = poly.max_abs_coeff();
        for z in &poly_zeros {
            if poly.eval(*z).norm() >= 1e-8 * scale * z.norm().max(1.0).powi(poly.degree() as i32) {
                return Err(Error::DegenerateMainPart(format!("inaccurate polynomial root {z}")));
            }
        }
        let mut main = MainPart {
            base,
            poly,
            poly_zeros,
            leading: LeadingData { s: 0, alpha: C64::new(0.0, 0.0), gamma: C64::new(0.0, 0.0), beta: C64::new(0.0, 0.0) },
        };
        main.leading = main.compute_leading_data()?;
        Ok(main)
    }

    /// S(z) = z·sin(πz) or sin(πz) style main parts: `P_N = z^power`.
    pub fn monomial_sin(b: f64, power: usize) -> Result<Self> {
        let mut coeffs = vec![C64::new(0.0, 0.0); power + 1];
        coeffs[power] = C64::new(1.0, 0.0);
        MainPart::new(SineTypeBase::sin_scaled(b)?, Polynomial::new(coeffs))
    }

    pub fn base(&self) -> &SineTypeBase {
        &self.base
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn poly_zeros(&self) -> &[C64] {
        &self.poly_zeros
    }

    /// N, the polynomial degree.
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn first_index(&self) -> i64 {
        1 - self.degree() as i64
    }

    pub fn type_b(&self) -> f64 {
        self.base.type_b()
    }

    pub fn separation(&self) -> f64 {
        self.base.separation()
    }

    pub fn leading_data(&self) -> LeadingData {
        self.leading
    }

    /// z_n⁰ for n ≥ 1 − N.
    pub fn lattice_zero(&self, n: i64) -> Result<C64> {
        let first = self.first_index();
        if n < first {
            return Err(Error::IndexOutOfRange { index: n, first });
        }
        Ok(self.lattice_zero_unchecked(n))
    }

    pub(crate) fn lattice_zero_unchecked(&self, n: i64) -> C64 {
        if n <= 0 {
            self.poly_zeros[(n - self.first_index()) as usize]
        } else {
            self.base.zero_unchecked(n as usize)
        }
    }

    /// μ_n = z_n⁰ when nonzero, −1 otherwise.
    pub fn mu(&self, n: i64) -> Result<C64> {
        Ok(mu_of(self.lattice_zero(n)?))
    }

    /// μ_n^N, the residual weight.
    pub fn mu_pow(&self, n: i64) -> Result<C64> {
        Ok(self.mu(n)?.powu(self.degree() as u32))
    }

    /// S^{(ν)}(z), ν ≤ 2.
    pub fn eval(&self, z: C64, order: usize) -> Result<C64> {
        if order > MAX_DERIV {
            return Err(Error::UnsupportedDerivOrder(order));
        }
        Ok(self.eval_unchecked(z, order))
    }

    pub(crate) fn eval_unchecked(&self, z: C64, order: usize) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut binom = 1.0;
        for j in 0..=order {
            acc += self.poly.eval_deriv(z, j) * self.base.eval_unchecked(z, order - j) * binom;
            binom = binom * (order - j) as f64 / (j + 1) as f64;
        }
        acc
    }

    /// Distance from 0 to the nearest lattice point that is not
    /// numerically at the origin.
    pub fn nearest_nonzero_lattice(&self) -> f64 {
        let floor = ORIGIN_CLUSTER * self.separation();
        self.poly_zeros
            .iter()
            .copied()
            .chain((1..=16).map(|n| self.base.zero_unchecked(n)))
            .map(|z| z.norm())
            .filter(|&r| r > floor)
            .fold(f64::INFINITY, f64::min)
    }

    /// Multiplicity of the origin counted on the lattice.
    pub fn lattice_multiplicity_at_origin(&self) -> usize {
        self.poly_zeros.iter().filter(|z| z.norm() == 0.0).count()
            + self.base.zero_multiplicity_at_origin(16)
    }

    /// Taylor coefficients a_0..=a_jmax of S at 0 by the trapezoid rule on
    /// the circle |z| = ρ.
    pub fn taylor_coefficients(&self, rho: f64, jmax: usize) -> Vec<C64> {
        let samples: Vec<C64> = (0..TAYLOR_NODES)
            .map(|m| {
                let w = C64::from_polar(1.0, 2.0 * PI * m as f64 / TAYLOR_NODES as f64);
                self.eval_unchecked(w * rho, 0)
            })
            .collect();
        (0..=jmax)
            .map(|j| {
                let sum: C64 = samples
                    .iter()
                    .enumerate()
                    .map(|(m, v)| {
                        v * C64::from_polar(1.0, -2.0 * PI * ((j * m) % TAYLOR_NODES) as f64 / TAYLOR_NODES as f64)
                    })
                    .sum();
                sum / (TAYLOR_NODES as f64 * rho.powi(j as i32))
            })
            .collect()
    }

    fn compute_leading_data(&self) -> Result<LeadingData> {
        let nearest = self.nearest_nonzero_lattice();
        let rho = if nearest.is_finite() { 0.5 * nearest } else { 0.5 };
        let jmax = self.degree() + 4;
        let a = self.taylor_coefficients(rho, jmax);
        let amax = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(amax > 0.0) {
            return Err(Error::DegenerateMainPart("all Taylor coefficients vanish".into()));
        }
        let s = a
            .iter()
            .position(|c| c.norm() >= MULTIPLICITY_TOL * amax)
            .filter(|&s| s < jmax)
            .ok_or_else(|| Error::DegenerateMainPart("no significant Taylor coefficient".into()))?;
        let alpha = a[s];
        let gamma = a[s + 1] / alpha;
        Ok(LeadingData { s, alpha, gamma, beta: gamma + s as f64 })
    }
}

pub(crate) fn mu_of(z0: C64) -> C64 {
    if z0.norm() != 0.0 {
        z0
    } else {
        C64::new(-1.0, 0.0)
    }
}

/// θ(z) = S(z) + ∫₋ᵦᵇ w(x)e^{izx}dx.
#[derive(Clone, Debug)]
pub struct ThetaFunction {
    main: MainPart,
    tail: FourierTail,
}

impl ThetaFunction {
    pub fn new(main: MainPart, tail: FourierTail) -> Result<Self> {
        let (b1, b2) = (main.type_b(), tail.type_b());
        if (b1 - b2).abs() > 1e-14 * b1 {
            return Err(Error::InvalidInput(format!("tail type {b2} differs from base type {b1}")));
        }
        Ok(ThetaFunction { main, tail })
    }

    pub fn main(&self) -> &MainPart {
        &self.main
    }

    pub fn tail(&self) -> &FourierTail {
        &self.tail
    }

    /// θ^{(ν)}(z), ν ≤ 2.
    pub fn eval(&self, z: C64, order: usize) -> Result<C64> {
        if order > MAX_DERIV {
            return Err(Error::UnsupportedDerivOrder(order));
        }
        Ok(self.eval_unchecked(z, order))
    }

    pub(crate) fn eval_unchecked(&self, z: C64, order: usize) -> C64 {
        self.main.eval_unchecked(z, order) + self.tail.eval(z, order)
    }

    pub fn value(&self, z: C64) -> C64 {
        self.eval_unchecked(z, 0)
    }

    /// f(z) = θ(z) − S(z).
    pub fn tail_part(&self, z: C64) -> C64 {
        self.tail.eval(z, 0)
    }
}
