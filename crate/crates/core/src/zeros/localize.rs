use std::collections::BTreeSet;

use rayon::prelude::*;

use super::contour::{winding_count_with, Rect, Winding, WindingOptions};
use super::refine::refine_root;
use super::sequence::ZeroSequence;
use crate::model::ThetaFunction;
use crate::{Error, Result, C64};

const DILATION: f64 = 1.017;
const DILATION_RETRIES: usize = 3;
const GROWTH_ATTEMPTS: usize = 8;
const TAIL_ROUNDS: usize = 4;
const CLUSTER_TOL: f64 = 1e-7;
const MAX_DEPTH: usize = 400;
// off-center first: lattice zeros sit on symmetric points
const SPLIT_FRACTIONS: [f64; 7] = [0.5123, 0.4877, 0.5371, 0.4629, 0.5619, 0.4381, 0.5];

/// Output of [`localize_zeros`].
#[derive(Clone, Debug)]
pub struct LocalizationReport {
    pub zeros: ZeroSequence,
    pub head_rect: Rect,
    /// Winding count of θ on `head_rect`.
    pub head_count: usize,
    /// Lattice indices (≤ n_max) whose zeros were taken from the head.
    pub head_indices: Vec<i64>,
    /// Newton iterations per entry of `zeros` (0 for collapsed clusters).
    pub newton_iterations: Vec<usize>,
    /// Relative boundary clearance of the head contour.
    pub head_clearance: f64,
    /// Smallest relative clearance over every contour that was counted.
    pub min_clearance: f64,
}

/// Finds z_n for n = 1−N..=n_max.
///
/// A head rectangle around the polynomial zeros is grown until its
/// winding count matches the lattice points inside it and every other
/// lattice point keeps a trust disk of radius separation/3 clear of it.
/// Head zeros come from recursive subdivision, the remaining ones from
/// Newton iterations started at their lattice points.
pub fn localize_zeros(theta: &ThetaFunction, n_max: i64) -> Result<LocalizationReport> {
    if n_max < 1 {
        return Err(Error::InvalidInput(format!("n_max must be at least 1, got {n_max}")));
    }
    let main = theta.main();
    let sep = main.separation();
    let delta = sep / 3.0;
    let first = main.first_index();
    let opts = WindingOptions::for_type(main.type_b());
    let lat = |n: i64| main.lattice_zero_unchecked(n);

    let mut forced: BTreeSet<i64> = (first..=1).collect();
    forced.extend(crowded(&lat, n_max, delta));

    let mut last_err = None;
    for _ in 0..TAIL_ROUNDS {
        let head = grow_head(theta, &forced, n_max, sep, delta, &opts)?;
        let inside: BTreeSet<i64> = head.inside.iter().copied().collect();
        let tail_idx: Vec<i64> = (1..=n_max).filter(|n| !inside.contains(n)).collect();
        let tail: Vec<(i64, Result<(C64, usize, f64)>)> = tail_idx
            .par_iter()
            .map(|&n| (n, tail_zero(theta, lat(n), delta, &opts)))
            .collect();
        let failed: Vec<i64> = tail.iter().filter(|(_, r)| r.is_err()).map(|(n, _)| *n).collect();
        if !failed.is_empty() {
            last_err = tail.into_iter().find_map(|(_, r)| r.err());
            forced.extend(failed);
            continue;
        }

        let len = (n_max - first + 1) as usize;
        let mut zeros = vec![C64::new(0.0, 0.0); len];
        let mut iters = vec![0usize; len];
        let mut min_clearance = head.winding.clearance.min(head.min_clearance);
        for (n, r) in tail {
            let (z, it, cl) = r.expect("failures handled above");
            zeros[(n - first) as usize] = z;
            iters[(n - first) as usize] = it;
            min_clearance = min_clearance.min(cl);
        }
        let mut head_indices = Vec::new();
        for (n, z, it) in head.assigned {
            if n <= n_max {
                zeros[(n - first) as usize] = z;
                iters[(n - first) as usize] = it;
                head_indices.push(n);
            }
        }
        return Ok(LocalizationReport {
            zeros: ZeroSequence::new(main, zeros),
            head_rect: head.rect,
            head_count: head.winding.count,
            head_indices,
            newton_iterations: iters,
            head_clearance: head.winding.clearance,
            min_clearance,
        });
    }
    Err(last_err.unwrap_or_else(|| Error::NoConvergence("tail localization failed".into())))
}

/// Base lattice indices whose trust disks overlap another lattice disk.
fn crowded<L: Fn(i64) -> C64>(lat: &L, n_max: i64, delta: f64) -> Vec<i64> {
    let mut pts: Vec<(i64, C64)> = (1..=n_max + 1).map(|n| (n, lat(n))).collect();
    pts.sort_by(|a, b| a.1.re.total_cmp(&b.1.re));
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[j].1.re - pts[i].1.re > 2.0 * delta {
                break;
            }
            if (pts[j].1 - pts[i].1).norm() <= 2.0 * delta {
                out.push(pts[i].0);
                out.push(pts[j].0);
            }
        }
    }
    out
}

struct Head {
    rect: Rect,
    winding: Winding,
    min_clearance: f64,
    inside: Vec<i64>,
    assigned: Vec<(i64, C64, usize)>,
}

fn grow_head(
    theta: &ThetaFunction,
    forced: &BTreeSet<i64>,
    n_max: i64,
    sep: f64,
    delta: f64,
    opts: &WindingOptions,
) -> Result<Head> {
    let main = theta.main();
    let first = main.first_index();
    let lat = |n: i64| main.lattice_zero_unchecked(n);
    let f = |z: C64| theta.eval_unchecked(z, 0);
    let mut last_err = None;
    for attempt in 0..GROWTH_ATTEMPTS {
        let g = attempt as f64 * sep;
        let mut members = forced.clone();
        let rect = loop {
            let rect = bounding_rect(members.iter().map(|&n| lat(n)), 0.5 * sep, sep);
            let before = members.len();
            members.extend(lattice_near(&lat, first, n_max, &rect, sep, |z| rect.distance(z) <= delta));
            if members.len() == before {
                break rect.inflate(g, g);
            }
        };
        let (rect, winding) = match winding_dilated(&f, rect, opts) {
            Ok(v) => v,
            Err(e @ Error::BoundaryTooClose { .. }) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let inside = lattice_near(&lat, first, n_max, &rect, sep, |z| rect.contains(z));
        let touching = lattice_near(&lat, first, n_max, &rect, sep, |z| !rect.contains(z) && rect.distance(z) <= delta);
        if !touching.is_empty() {
            continue;
        }
        if winding.count != inside.len() {
            last_err = Some(Error::CountMismatch { found: winding.count as i64, expected: inside.len() as i64 });
            continue;
        }
        let mut found = Vec::new();
        let min_clearance = extract(theta, &rect, winding.count, opts, 0, &mut found)?;
        let zeros = expand(merge_clusters(found));
        let assigned = assign(&lat, &inside, zeros);
        return Ok(Head { rect, winding, min_clearance, inside, assigned });
    }
    Err(last_err.unwrap_or_else(|| Error::NoConvergence("head rectangle did not stabilize".into())))
}

fn bounding_rect<I: Iterator<Item = C64>>(pts: I, dx: f64, dy: f64) -> Rect {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in pts {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    Rect::from_bounds(x0 - dx, x1 + dx, y0 - dy, y1 + dy).expect("inflated box has positive extent")
}

/// Lattice indices satisfying `pred`, scanning base indices far enough to
/// cover every point near `rect`.
fn lattice_near<L, P>(lat: &L, first: i64, n_max: i64, rect: &Rect, sep: f64, pred: P) -> Vec<i64>
where
    L: Fn(i64) -> C64,
    P: Fn(C64) -> bool,
{
    let reach = rect.lo().norm().max(rect.hi().norm()).max(C64::new(rect.lo().re, rect.hi().im).norm())
        .max(C64::new(rect.hi().re, rect.lo().im).norm());
    let n_scan = n_max.max((4.0 * reach / sep).ceil() as i64 + 8);
    (first..=n_scan).filter(|&n| pred(lat(n))).collect()
}

fn winding_dilated<F: Fn(C64) -> C64>(f: &F, rect: Rect, opts: &WindingOptions) -> Result<(Rect, Winding)> {
    let mut r = rect;
    let mut last = None;
    for _ in 0..=DILATION_RETRIES {
        match winding_count_with(f, &r, opts) {
            Ok(w) => return Ok((r, w)),
            Err(e @ Error::BoundaryTooClose { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        r = r.dilate(DILATION);
    }
    Err(last.expect("at least one attempt"))
}

fn tail_zero(theta: &ThetaFunction, z0: C64, delta: f64, opts: &WindingOptions) -> Result<(C64, usize, f64)> {
    let square = Rect::centered(z0, delta, delta)?;
    let f = |z: C64| theta.eval_unchecked(z, 0);
    let w = winding_count_with(f, &square, opts)?;
    if w.count != 1 {
        return Err(Error::CountMismatch { found: w.count as i64, expected: 1 });
    }
    let r = refine_root(f, |z| theta.eval_unchecked(z, 1), z0, delta * 2f64.sqrt(), opts)?;
    if !square.contains(r.z) {
        return Err(Error::LeftTrustRegion { center: z0.to_string(), radius: delta });
    }
    Ok((r.z, r.iterations, w.clearance))
}

#[derive(Clone, Copy, Debug)]
struct Found {
    z: C64,
    mult: usize,
    iterations: usize,
}

/// Recursive subdivision of `rect`, known to hold `count` zeros.
/// Returns the smallest clearance met.
fn extract(
    theta: &ThetaFunction,
    rect: &Rect,
    count: usize,
    opts: &WindingOptions,
    depth: usize,
    out: &mut Vec<Found>,
) -> Result<f64> {
    if count == 0 {
        return Ok(1.0);
    }
    let scale = rect.center().norm().max(1.0);
    if rect.diag() < CLUSTER_TOL * scale {
        out.push(Found { z: polish_multiple(theta, rect, count), mult: count, iterations: 0 });
        return Ok(1.0);
    }
    if count == 1 {
        let f = |z: C64| theta.eval_unchecked(z, 0);
        let df = |z: C64| theta.eval_unchecked(z, 1);
        if let Ok(r) = refine_root(f, df, rect.center(), 0.5 * rect.diag(), opts) {
            if rect.contains(r.z) {
                out.push(Found { z: r.z, mult: 1, iterations: r.iterations });
                return Ok(1.0);
            }
        }
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NoConvergence("head subdivision exceeded the depth limit".into()));
    }
    let f = |z: C64| theta.eval_unchecked(z, 0);
    let mut last = None;
    for &frac in &SPLIT_FRACTIONS {
        let (a, b) = rect.split(frac);
        let (wa, wb) = match (winding_count_with(f, &a, opts), winding_count_with(f, &b, opts)) {
            (Ok(wa), Ok(wb)) => (wa, wb),
            (Err(e), _) | (_, Err(e)) => {
                last = Some(e);
                continue;
            }
        };
        if wa.count + wb.count != count {
            last = Some(Error::CountMismatch { found: (wa.count + wb.count) as i64, expected: count as i64 });
            continue;
        }
        let ca = extract(theta, &a, wa.count, opts, depth + 1, out)?;
        let cb = extract(theta, &b, wb.count, opts, depth + 1, out)?;
        return Ok(wa.clearance.min(wb.clearance).min(ca).min(cb));
    }
    if count > 1 && rect.diag() < 1e3 * CLUSTER_TOL * scale {
        // counts below this size are dominated by rounding; treat as one cluster
        out.push(Found { z: polish_multiple(theta, rect, count), mult: count, iterations: 0 });
        return Ok(1.0);
    }
    Err(last.unwrap_or_else(|| Error::NoConvergence("subdivision failed".into())))
}

/// Locates a zero of multiplicity m as a root of θ^{(m−1)}.
fn polish_multiple(theta: &ThetaFunction, rect: &Rect, m: usize) -> C64 {
    let c = rect.center();
    if (2..=3).contains(&m) {
        let order = m - 1;
        let mut z = c;
        for _ in 0..30 {
            let d = theta.eval_unchecked(z, order + 1);
            if d.norm() == 0.0 {
                break;
            }
            let step = theta.eval_unchecked(z, order) / d;
            z -= step;
            if step.norm() < 1e-15 * z.norm().max(1.0) {
                break;
            }
        }
        if rect.distance(z) <= rect.diag() {
            return z;
        }
    }
    c
}

fn merge_clusters(mut found: Vec<Found>) -> Vec<Found> {
    loop {
        let mut merged = false;
        'outer: for i in 0..found.len() {
            for j in i + 1..found.len() {
                let scale = found[i].z.norm().max(1.0);
                if (found[i].z - found[j].z).norm() < CLUSTER_TOL * scale {
                    let (a, b) = (found[i], found[j]);
                    let mult = a.mult + b.mult;
                    found[i] = Found {
                        z: (a.z * a.mult as f64 + b.z * b.mult as f64) / mult as f64,
                        mult,
                        iterations: a.iterations.max(b.iterations),
                    };
                    found.remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            return found;
        }
    }
}

fn expand(found: Vec<Found>) -> Vec<(C64, usize)> {
    let mut out: Vec<(C64, usize)> =
        found.into_iter().flat_map(|f| std::iter::repeat_n((f.z, f.iterations), f.mult)).collect();
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    out
}

/// Greedy nearest matching of found zeros to lattice indices.
fn assign<L: Fn(i64) -> C64>(lat: &L, indices: &[i64], zeros: Vec<(C64, usize)>) -> Vec<(i64, C64, usize)> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(indices.len() * zeros.len());
    for (i, &n) in indices.iter().enumerate() {
        let z0 = lat(n);
        for (j, (z, _)) in zeros.iter().enumerate() {
            pairs.push(((z - z0).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_i = vec![false; indices.len()];
    let mut used_j = vec![false; zeros.len()];
    let mut out = Vec::with_capacity(indices.len());
    for (_, i, j) in pairs {
        if !used_i[i] && !used_j[j] {
            used_i[i] = true;
            used_j[j] = true;
            out.push((indices[i], zeros[j].0, zeros[j].1));
        }
    }
    out.sort_by_key(|t| t.0);
    out
}

/// All zeros of θ inside `rect` with multiplicity, sorted by real part.
pub fn zeros_in_rect(theta: &ThetaFunction, rect: &Rect) -> Result<Vec<C64>> {
    let opts = WindingOptions::for_type(theta.main().type_b());
    let f = |z: C64| theta.eval_unchecked(z, 0);
    let (rect, w) = winding_dilated(&f, *rect, &opts)?;
    let mut found = Vec::new();
    extract(theta, &rect, w.count, &opts, 0, &mut found)?;
    Ok(expand(merge_clusters(found)).into_iter().map(|(z, _)| z).collect())
}
