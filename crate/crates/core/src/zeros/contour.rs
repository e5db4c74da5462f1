use std::f64::consts::{FRAC_PI_2, PI};

use crate::{Error, Result, C64};

/// Axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    lo: C64,
    hi: C64,
}

impl Rect {
    pub fn new(lo: C64, hi: C64) -> Result<Self> {
        if !(hi.re > lo.re && hi.im > lo.im) {
            return Err(Error::InvalidInput(format!("degenerate rectangle {lo} .. {hi}")));
        }
        Ok(Rect { lo, hi })
    }

    pub fn from_bounds(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Rect::new(C64::new(x0, y0), C64::new(x1, y1))
    }

    pub fn centered(center: C64, half_width: f64, half_height: f64) -> Result<Self> {
        Rect::new(center - C64::new(half_width, half_height), center + C64::new(half_width, half_height))
    }

    pub fn lo(&self) -> C64 {
        self.lo
    }

    pub fn hi(&self) -> C64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> f64 {
        self.hi.im - self.lo.im
    }

    pub fn center(&self) -> C64 {
        (self.lo + self.hi) * 0.5
    }

    pub fn diag(&self) -> f64 {
        (self.hi - self.lo).norm()
    }

    /// Strict interior test.
    pub fn contains(&self, z: C64) -> bool {
        z.re > self.lo.re && z.re < self.hi.re && z.im > self.lo.im && z.im < self.hi.im
    }

    /// Euclidean distance from `z` to the closed rectangle (0 inside).
    pub fn distance(&self, z: C64) -> f64 {
        let dx = (self.lo.re - z.re).max(0.0).max(z.re - self.hi.re);
        let dy = (self.lo.im - z.im).max(0.0).max(z.im - self.hi.im);
        dx.hypot(dy)
    }

    /// Distance from `z` to the boundary curve.
    pub fn boundary_distance(&self, z: C64) -> f64 {
        if self.contains(z) {
            (z.re - self.lo.re).min(self.hi.re - z.re).min(z.im - self.lo.im).min(self.hi.im - z.im)
        } else {
            self.distance(z)
        }
    }

    /// Scales both half-extents by `factor` about the center.
    pub fn dilate(&self, factor: f64) -> Rect {
        let c = self.center();
        let h = (self.hi - self.lo) * (0.5 * factor);
        Rect { lo: c - h, hi: c + h }
    }

    pub fn inflate(&self, dx: f64, dy: f64) -> Rect {
        Rect { lo: self.lo - C64::new(dx, dy), hi: self.hi + C64::new(dx, dy) }
    }

    /// Splits across the longer side at fraction `frac` of its length.
    pub fn split(&self, frac: f64) -> (Rect, Rect) {
        if self.width() >= self.height() {
            let x = self.lo.re + frac * self.width();
            (
                Rect { lo: self.lo, hi: C64::new(x, self.hi.im) },
                Rect { lo: C64::new(x, self.lo.im), hi: self.hi },
            )
        } else {
            let y = self.lo.im + frac * self.height();
            (
                Rect { lo: self.lo, hi: C64::new(self.hi.re, y) },
                Rect { lo: C64::new(self.lo.re, y), hi: self.hi },
            )
        }
    }

    fn corners(&self) -> [C64; 4] {
        [self.lo, C64::new(self.hi.re, self.lo.im), self.hi, C64::new(self.lo.re, self.hi.im)]
    }
}

const LINEARITY: f64 = 0.25;

/// Boundary sampling controls for [`winding_count_with`].
#[derive(Clone, Copy, Debug)]
pub struct WindingOptions {
    /// Initial samples per unit of boundary length.
    pub samples_per_unit: f64,
    pub min_per_edge: usize,
    /// Maximum bisection depth of a single boundary segment.
    pub max_depth: usize,
    /// Relative clearance: min |f| on the boundary must exceed
    /// `clearance · max |f|`.
    pub clearance: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions { samples_per_unit: 16.0, min_per_edge: 8, max_depth: 40, clearance: 1e-12 }
    }
}

impl WindingOptions {
    /// Sampling density adapted to exponential type `b`.
    pub fn for_type(b: f64) -> Self {
        WindingOptions { samples_per_unit: (8.0 * b).max(16.0), ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Winding {
    pub count: usize,
    /// min |f| / max |f| over the boundary samples.
    pub clearance: f64,
    pub evaluations: usize,
}

/// Number of zeros of `f` inside `rect` with default sampling.
pub fn winding_count<F: Fn(C64) -> C64>(f: F, rect: &Rect) -> Result<usize> {
    winding_count_with(f, rect, &WindingOptions::default()).map(|w| w.count)
}

/// Argument principle by piecewise phase tracking.
///
/// The boundary is sampled uniformly, then every segment whose phase
/// increment reaches π/2, or whose midpoint value strays from the chord,
/// is bisected. The summed increments divided by 2π give the count.
pub fn winding_count_with<F: Fn(C64) -> C64>(f: F, rect: &Rect, opts: &WindingOptions) -> Result<Winding> {
    let corners = rect.corners();
    let mut pts = Vec::new();
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let n = ((b - a).norm() * opts.samples_per_unit).ceil().max(opts.min_per_edge as f64) as usize;
        pts.extend((0..n).map(|i| a + (b - a) * (i as f64 / n as f64)));
    }
    let vals: Vec<C64> = pts.iter().map(|&p| f(p)).collect();
    let mut tracker = Tracker { min_abs: f64::INFINITY, max_abs: 0.0, evaluations: vals.len() };
    for v in &vals {
        tracker.observe(*v)?;
    }
    let mut total = 0.0;
    for i in 0..pts.len() {
        let j = (i + 1) % pts.len();
        total += tracker.segment(&f, (pts[i], vals[i]), (pts[j], vals[j]), opts)?;
    }
    if !(tracker.min_abs > opts.clearance * tracker.max_abs) {
        return Err(Error::BoundaryTooClose { min_abs: tracker.min_abs, scale: tracker.max_abs });
    }
    let turns = (total / (2.0 * PI)).round();
    if turns < 0.0 {
        return Err(Error::NoConvergence(format!("negative winding {turns} for an analytic function")));
    }
    Ok(Winding {
        count: turns as usize,
        clearance: tracker.min_abs / tracker.max_abs,
        evaluations: tracker.evaluations,
    })
}

struct Tracker {
    min_abs: f64,
    max_abs: f64,
    evaluations: usize,
}

impl Tracker {
    fn observe(&mut self, v: C64) -> Result<()> {
        let a = v.norm();
        if !a.is_finite() {
            return Err(Error::NoConvergence("non-finite function value on the contour".into()));
        }
        if a == 0.0 {
            return Err(Error::BoundaryTooClose { min_abs: 0.0, scale: self.max_abs });
        }
        self.min_abs = self.min_abs.min(a);
        self.max_abs = self.max_abs.max(a);
        Ok(())
    }

    fn segment<F: Fn(C64) -> C64>(
        &mut self,
        f: &F,
        start: (C64, C64),
        end: (C64, C64),
        opts: &WindingOptions,
    ) -> Result<f64> {
        let mut total = 0.0;
        let mut stack = vec![(start, end, 0usize)];
        while let Some(((p0, f0), (p1, f1), depth)) = stack.pop() {
            let d = (f1 * f0.conj()).arg();
            let pm = (p0 + p1) * 0.5;
            let fm = f(pm);
            self.evaluations += 1;
            self.observe(fm)?;
            // near-linear behaviour rules out a multiple zero hiding between samples
            let linear = (fm - (f0 + f1) * 0.5).norm() <= LINEARITY * f0.norm().min(f1.norm());
            if d.abs() < FRAC_PI_2 && linear {
                total += d;
                continue;
            }
            if depth >= opts.max_depth {
                let local = f0.norm().min(f1.norm()).min(fm.norm());
                if local <= 1e-3 * self.max_abs {
                    return Err(Error::BoundaryTooClose { min_abs: local, scale: self.max_abs });
                }
                return Err(Error::NoConvergence("phase refinement exceeded the depth limit".into()));
            }
            // second half first so the first half is processed next
            stack.push(((pm, fm), (p1, f1), depth + 1));
            stack.push(((p0, f0), (pm, fm), depth + 1));
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin_pi(z: C64) -> C64 {
        (z * PI).sin()
    }

    #[test]
    fn counts_integers() {
        let r = Rect::from_bounds(-5.5, 5.5, -1.0, 1.0).unwrap();
        assert_eq!(winding_count(sin_pi, &r).unwrap(), 11);
        let r = Rect::from_bounds(0.25, 0.75, -0.25, 0.25).unwrap();
        assert_eq!(winding_count(sin_pi, &r).unwrap(), 0);
    }

    #[test]
    fn double_zero() {
        let r = Rect::from_bounds(-0.5, 0.5, -0.5, 0.5).unwrap();
        assert_eq!(winding_count(|z| z * sin_pi(z), &r).unwrap(), 2);
    }

    #[test]
    fn zero_on_boundary_is_reported() {
        let r = Rect::from_bounds(1.0, 2.5, -0.5, 0.5).unwrap();
        assert!(matches!(winding_count(sin_pi, &r), Err(Error::BoundaryTooClose { .. })));
    }

    #[test]
    fn rect_geometry() {
        let r = Rect::from_bounds(-1.0, 1.0, -2.0, 2.0).unwrap();
        assert!(Rect::from_bounds(1.0, 1.0, 0.0, 1.0).is_err());
        assert_eq!(r.distance(C64::new(4.0, 6.0)), 5.0);
        assert_eq!(r.boundary_distance(C64::new(0.5, 0.0)), 0.5);
        let (a, b) = r.split(0.25);
        assert_eq!(a.height(), 1.0);
        assert_eq!(b.height(), 3.0);
        assert!((r.dilate(2.0).width() - 4.0).abs() < 1e-15);
    }
}
