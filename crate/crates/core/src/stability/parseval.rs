use std::f64::consts::PI;

use crate::model::FourierTail;
use crate::quadrature::GaussLegendre;
use crate::{Error, Result, C64};

const GL_ORDER: usize = 16;
const Z_START: f64 = 64.0;
const Z_MAX: f64 = 1e6;
const WINDOW_TOL: f64 = 1e-6;
const REFINE_TOL: f64 = 1e-12;
const MAX_REFINE: usize = 3;
const FAR_PANELS: usize = 16;

/// ∫_ℝ |F[w](x + iy)|² dx with a certified bound on the part that is not
/// integrated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineIntegral {
    pub value: f64,
    /// Bound on the neglected oscillatory remainder beyond the window.
    pub remainder_bound: f64,
    /// Half-width Z of the window integrated with Gauss–Legendre panels.
    pub window: f64,
}

/// Computes the line integral of |F|² at height `y`.
///
/// On [−Z, Z] the transform is evaluated directly. Beyond Z, with
/// F = 2 sin(bz)·G and G = Σ c_k(−1)^k/(z + πk/b), the integrand splits
/// into 2cosh(2by)|G|², integrated after x = Z/t, and −2cos(2bx)|G|²,
/// whose integral over each half-line is at most 3(Σ|c_k|)²/(b(Z − a)²)
/// with a the largest pole distance. Z doubles until that bound falls
/// below 1e−6 of the value.
pub fn line_integral(tail: &FourierTail, y: f64) -> Result<LineIntegral> {
    if tail.is_zero() {
        return Ok(LineIntegral { value: 0.0, remainder_bound: 0.0, window: 0.0 });
    }
    let b = tail.type_b();
    let a = tail.pole_radius() + y.abs();
    let abs_sum = tail.abs_sum();
    let gl = GaussLegendre::new(GL_ORDER);
    let mut z = Z_START.max(4.0 * a + 16.0);
    loop {
        let inner = window_integral(tail, y, z, &gl);
        let outer = far_integral(tail, y, z, &gl);
        let value = inner + outer;
        let bound = 2.0 * 3.0 * abs_sum * abs_sum / (b * (z - a).powi(2));
        if bound < WINDOW_TOL * value {
            return Ok(LineIntegral { value, remainder_bound: bound, window: z });
        }
        if z >= Z_MAX {
            return Err(Error::QuadratureTailTooLarge { bound, window: z });
        }
        z = (2.0 * z).min(Z_MAX);
    }
}

fn window_integral(tail: &FourierTail, y: f64, z: f64, gl: &GaussLegendre) -> f64 {
    let b = tail.type_b();
    let integrand = |x: f64| tail.eval(C64::new(x, y), 0).norm_sqr();
    let mut panels = ((2.0 * z) / (PI / (2.0 * b))).ceil() as usize;
    let mut prev = gl.integrate(-z, z, panels, integrand);
    for _ in 0..MAX_REFINE {
        panels *= 2;
        let next = gl.integrate(-z, z, panels, integrand);
        let done = (next - prev).abs() <= REFINE_TOL * next.abs();
        prev = next;
        if done {
            break;
        }
    }
    prev
}

fn far_integral(tail: &FourierTail, y: f64, z: f64, gl: &GaussLegendre) -> f64 {
    let b = tail.type_b();
    let modes: Vec<(f64, C64)> = tail
        .modes()
        .filter(|(_, c)| c.norm() != 0.0)
        .map(|(k, c)| (PI * k as f64 / b, if k % 2 == 0 { c } else { -c }))
        .collect();
    let g = |x: f64| -> C64 { modes.iter().map(|(p, c)| c / C64::new(x + p, y)).sum() };
    let weight = 2.0 * (2.0 * b * y).cosh();
    let side = |sign: f64| {
        gl.integrate(0.0, 1.0, FAR_PANELS, |t| {
            if t == 0.0 {
                return 0.0;
            }
            let x = sign * z / t;
            weight * g(x).norm_sqr() * z / (t * t)
        })
    };
    side(1.0) + side(-1.0)
}

/// Quadrature value of ∫|F[w]|² against 2π‖w‖².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParsevalReport {
    pub lhs: f64,
    pub rhs: f64,
    pub remainder_bound: f64,
    pub window: f64,
}

impl ParsevalReport {
    pub fn relative_gap(&self) -> f64 {
        if self.rhs == 0.0 {
            self.lhs.abs()
        } else {
            (self.lhs - self.rhs).abs() / self.rhs
        }
    }
}

pub fn parseval_l2(tail_diff: &FourierTail) -> Result<ParsevalReport> {
    let li = line_integral(tail_diff, 0.0)?;
    Ok(ParsevalReport {
        lhs: li.value,
        rhs: 2.0 * PI * tail_diff.norm_sq(),
        remainder_bound: li.remainder_bound,
        window: li.window,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineShiftReport {
    pub y: f64,
    pub shifted_norm: f64,
    /// e^{2b|y|} times the real-line integral.
    pub bound: f64,
    pub holds: bool,
}

/// Compares the integral on Im z = y with the growth bound from the real
/// line.
pub fn line_shift_check(tail_diff: &FourierTail, y: f64) -> Result<LineShiftReport> {
    let real = line_integral(tail_diff, 0.0)?.value;
    let shifted = if y == 0.0 { real } else { line_integral(tail_diff, y)?.value };
    let bound = (2.0 * tail_diff.type_b() * y.abs()).exp() * real;
    Ok(LineShiftReport { y, shifted_norm: shifted, bound, holds: shifted <= bound * (1.0 + 1e-6) })
}
