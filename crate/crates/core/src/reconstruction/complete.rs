use crate::model::{MainPart, ThetaFunction};
use crate::zeros::{winding_count_with, zeros_in_rect, Rect, WindingOptions, ZeroSequence};
use crate::{Error, Result, C64};

use super::moments::{build_moment_system, invert_to_tail, MomentSystem, TailRecovery};

const RETRIES: usize = 5;
const GROWTH: f64 = 1.5;
const DILATION: f64 = 1.017;
const MATCH_TOL: f64 = 1e-6;

/// A sequence completed with its first N zeros.
#[derive(Clone, Debug)]
pub struct Completion {
    pub zeros: ZeroSequence,
    /// θ rebuilt from the tail recovered out of the given zeros.
    pub theta: ThetaFunction,
    pub recovery: TailRecovery,
    pub search_rect: Rect,
}

/// Given z_n for n ≥ 1, recovers the tail, rebuilds θ and finds the
/// remaining zeros z_{1−N}..z_0.
pub fn complete_zeros(partial: &ZeroSequence, main: &MainPart, m: usize) -> Result<Completion> {
    let system = build_moment_system(partial, main, m, None)?;
    complete_with_system(&system, partial, main)
}

/// As [`complete_zeros`] with a prebuilt (possibly row-permuted) system.
pub fn complete_with_system(system: &MomentSystem, partial: &ZeroSequence, main: &MainPart) -> Result<Completion> {
    if partial.first() != 1 {
        return Err(Error::InvalidInput(format!("partial sequence must start at n = 1, got {}", partial.first())));
    }
    let recovery = invert_to_tail(system)?;
    let theta = ThetaFunction::new(main.clone(), recovery.tail.clone())?;
    let n = main.degree();
    let mut rect = head_search_rect(main);
    if n == 0 {
        let zeros = ZeroSequence::new(main, partial.zeros().to_vec());
        return Ok(Completion { zeros, theta, recovery, search_rect: rect });
    }
    let opts = WindingOptions::for_type(main.type_b());
    let f = |z: C64| theta.value(z);
    let mut last = None;
    for _ in 0..=RETRIES {
        match head_in_rect(&theta, &f, &rect, partial, n, &opts) {
            Ok(head) => {
                let mut all = head;
                all.extend_from_slice(partial.zeros());
                return Ok(Completion { zeros: ZeroSequence::new(main, all), theta, recovery, search_rect: rect });
            }
            Err(e @ (Error::CountMismatch { .. } | Error::BoundaryTooClose { .. })) => last = Some(e),
            Err(e) => return Err(e),
        }
        rect = rect.dilate(GROWTH);
    }
    Err(last.expect("at least one attempt"))
}

/// Smallest box around the polynomial zeros, inflated by two separations.
pub fn head_search_rect(main: &MainPart) -> Rect {
    let sep = main.separation();
    let pts = main.poly_zeros();
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if let Some(p) = pts.first() {
        (x0, x1, y0, y1) = (p.re, p.re, p.im, p.im);
    }
    for p in pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    Rect::from_bounds(x0 - 2.0 * sep, x1 + 2.0 * sep, y0 - 2.0 * sep, y1 + 2.0 * sep).expect("positive extent")
}

fn head_in_rect<F: Fn(C64) -> C64>(
    theta: &ThetaFunction,
    f: &F,
    rect: &Rect,
    partial: &ZeroSequence,
    n: usize,
    opts: &WindingOptions,
) -> Result<Vec<C64>> {
    let mut r = *rect;
    let mut count = None;
    for _ in 0..=3 {
        match winding_count_with(f, &r, opts) {
            Ok(w) => {
                count = Some(w.count);
                break;
            }
            Err(Error::BoundaryTooClose { .. }) => r = r.dilate(DILATION),
            Err(e) => return Err(e),
        }
    }
    let count = count.ok_or(Error::BoundaryTooClose { min_abs: 0.0, scale: 0.0 })?;
    let known: Vec<C64> = partial.zeros().iter().copied().filter(|z| r.contains(*z)).collect();
    if count != known.len() + n {
        return Err(Error::CountMismatch { found: count as i64, expected: (known.len() + n) as i64 });
    }
    let mut found = zeros_in_rect(theta, &r)?;
    for k in &known {
        let (i, d) = found
            .iter()
            .enumerate()
            .map(|(i, z)| (i, (z - k).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::CountMismatch { found: 0, expected: known.len() as i64 })?;
        if d > MATCH_TOL * k.norm().max(1.0) {
            return Err(Error::CountMismatch { found: count as i64, expected: (known.len() + n) as i64 });
        }
        found.remove(i);
    }
    if found.len() != n {
        return Err(Error::CountMismatch { found: (found.len() + known.len()) as i64, expected: (known.len() + n) as i64 });
    }
    order_head(theta.main(), found)
}

/// Assigns head zeros to indices 1−N..0 by greedy nearest matching with
/// the polynomial zeros.
fn order_head(main: &MainPart, found: Vec<C64>) -> Result<Vec<C64>> {
    let lattice = main.poly_zeros();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, z0) in lattice.iter().enumerate() {
        for (j, z) in found.iter().enumerate() {
            pairs.push(((z - z0).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = vec![None; lattice.len()];
    let mut used = vec![false; found.len()];
    for (_, i, j) in pairs {
        if out[i].is_none() && !used[j] {
            out[i] = Some(found[j]);
            used[j] = true;
        }
    }
    Ok(out.into_iter().map(|z| z.expect("square assignment")).collect())
}
