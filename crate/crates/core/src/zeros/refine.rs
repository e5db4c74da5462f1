use super::contour::{winding_count_with, Rect, WindingOptions};
use crate::model::ThetaFunction;
use crate::{Error, Result, C64};

const MAX_ITER: usize = 60;
const STALL_LIMIT: usize = 5;
const MAX_BISECTIONS: usize = 240;
const RESIDUAL_TOL: f64 = 1e-12;

/// Result of a trust-region refinement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Refined {
    pub z: C64,
    pub iterations: usize,
    /// True when Newton stalled and contour bisection took over.
    pub fallback: bool,
}

/// Polishes the unique simple zero of θ in the disk |z − z0| ≤ trust_radius.
pub fn refine_zero(theta: &ThetaFunction, z0: C64, trust_radius: f64) -> Result<Refined> {
    let opts = WindingOptions::for_type(theta.main().type_b());
    refine_root(
        |z| theta.eval_unchecked(z, 0),
        |z| theta.eval_unchecked(z, 1),
        z0,
        trust_radius,
        &opts,
    )
}

/// Newton iteration clamped to a trust disk with a contour-bisection
/// fallback. The caller guarantees a single simple zero in the disk.
pub fn refine_root<F, D>(f: F, df: D, z0: C64, radius: f64, opts: &WindingOptions) -> Result<Refined>
where
    F: Fn(C64) -> C64,
    D: Fn(C64) -> C64,
{
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("trust radius must be positive, got {radius}")));
    }
    match newton(&f, &df, z0, z0, radius, 0) {
        Ok(r) => Ok(r),
        Err(Error::LeftTrustRegion { .. }) | Err(Error::MaxIterations(_)) | Err(Error::NoConvergence(_)) => {
            bisect(&f, &df, z0, radius, opts)
        }
        Err(e) => Err(e),
    }
}

fn converged(v: C64, d: C64, radius: f64) -> bool {
    v.norm() < RESIDUAL_TOL * (d.norm() * radius).max(1.0)
}

fn newton<F, D>(f: &F, df: &D, start: C64, center: C64, radius: f64, used: usize) -> Result<Refined>
where
    F: Fn(C64) -> C64,
    D: Fn(C64) -> C64,
{
    let mut z = start;
    let mut best = f64::INFINITY;
    let mut stall = 0;
    for it in used..MAX_ITER {
        let v = f(z);
        let d = df(z);
        if converged(v, d, radius) {
            return Ok(Refined { z, iterations: it, fallback: used > 0 });
        }
        if v.norm() < best {
            best = v.norm();
            stall = 0;
        } else {
            stall += 1;
            if stall >= STALL_LIMIT {
                return Err(Error::NoConvergence("Newton stalled".into()));
            }
        }
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::NoConvergence("vanishing derivative".into()));
        }
        let mut step = v / d;
        let cap = 0.5 * radius;
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        let next = z - step;
        if (next - center).norm() > radius {
            return Err(Error::LeftTrustRegion { center: center.to_string(), radius });
        }
        if next == z {
            // no representable progress: accept if the residual is at rounding level
            let scale = d.norm() * z.norm().max(radius) * f64::EPSILON * 64.0;
            if v.norm() <= scale {
                return Ok(Refined { z, iterations: it + 1, fallback: used > 0 });
            }
            return Err(Error::NoConvergence("Newton step underflow".into()));
        }
        z = next;
    }
    Err(Error::MaxIterations(MAX_ITER))
}

// off-center first: lattice zeros sit on symmetric points
const SPLIT_FRACTIONS: [f64; 7] = [0.5123, 0.4877, 0.5371, 0.4629, 0.5619, 0.4381, 0.5];

/// Shrinks a square around the zero by winding counts until Newton
/// converges from its center.
fn bisect<F, D>(f: &F, df: &D, z0: C64, radius: f64, opts: &WindingOptions) -> Result<Refined>
where
    F: Fn(C64) -> C64,
    D: Fn(C64) -> C64,
{
    let mut start = None;
    for half in [radius, radius / 2f64.sqrt()] {
        let rect = Rect::centered(z0, half, half)?;
        if winding_count_with(f, &rect, opts)?.count == 1 {
            start = Some(rect);
            break;
        }
    }
    let mut rect = start.ok_or_else(|| Error::LeftTrustRegion { center: z0.to_string(), radius })?;
    for it in 0..MAX_BISECTIONS {
        let c = rect.center();
        let r = 0.5 * rect.diag();
        if let Ok(mut out) = newton(f, df, c, c, r, (it + 1).min(MAX_ITER - 8)) {
            if rect.contains(out.z) || rect.distance(out.z) < 1e-12 * rect.diag() {
                out.fallback = true;
                return Ok(out);
            }
        }
        if r <= f64::EPSILON * 16.0 * c.norm().max(1.0) {
            return Ok(Refined { z: c, iterations: it + 1, fallback: true });
        }
        rect = choose_half(f, &rect, opts)?;
    }
    Err(Error::MaxIterations(MAX_BISECTIONS))
}

fn choose_half<F: Fn(C64) -> C64>(f: &F, rect: &Rect, opts: &WindingOptions) -> Result<Rect> {
    let mut last = None;
    for &frac in &SPLIT_FRACTIONS {
        let (a, b) = rect.split(frac);
        match winding_count_with(f, &a, opts) {
            Ok(w) if w.count == 1 => return Ok(a),
            Ok(w) if w.count == 0 => return Ok(b),
            Ok(w) => last = Some(Error::CountMismatch { found: w.count as i64, expected: 1 }),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::NoConvergence("bisection failed".into())))
}
