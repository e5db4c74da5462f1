use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Complex polynomial with coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

/// Roots closer than this are reported as one multiple root.
const CLUSTER_TOL: f64 = 1e-7;

impl Polynomial {
    /// Builds `c[0] + c[1] z + ...`; trailing exact zeros are trimmed.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == C64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: C64) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn from_roots(roots: &[C64], leading: C64) -> Self {
        let mut p = Polynomial::constant(leading);
        for &r in roots {
            p = p.mul(&Polynomial::new(vec![-r, C64::new(1.0, 0.0)]));
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    pub fn leading(&self) -> C64 {
        *self.coeffs.last().unwrap()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `order`-th derivative at `z` (any order).
    pub fn eval_deriv(&self, z: C64, order: usize) -> C64 {
        if order > self.degree() {
            return C64::new(0.0, 0.0);
        }
        let mut acc = C64::new(0.0, 0.0);
        for j in (order..self.coeffs.len()).rev() {
            let falling: f64 = ((j - order + 1)..=j).map(|t| t as f64).product();
            acc = acc * z + self.coeffs[j] * falling;
        }
        acc
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = C64::new(0.0, 0.0);
        Polynomial::new(
            (0..n)
                .map(|j| {
                    self.coeffs.get(j).copied().unwrap_or(zero) + other.coeffs.get(j).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&Polynomial::new(other.coeffs.iter().map(|c| -c).collect()))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Euclidean division, returns (quotient, remainder).
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        if divisor.is_zero() {
            return Err(Error::InvalidInput("division by the zero polynomial".into()));
        }
        let dd = divisor.degree();
        if self.degree() < dd {
            return Ok((Polynomial::constant(C64::new(0.0, 0.0)), self.clone()));
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![C64::new(0.0, 0.0); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
        }
        rem.truncate(dd.max(1));
        if dd == 0 {
            rem = vec![C64::new(0.0, 0.0)];
        }
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    /// All roots with multiplicity.
    ///
    /// Exact zeros at the origin are split off from the low-order
    /// coefficients; the rest come from the eigenvalues of the companion
    /// matrix, Newton-polished on the original polynomial. Roots closer
    /// than 1e−7 are merged into one multiple root. The output is sorted by
    /// modulus, then by real and imaginary part.
    pub fn roots(&self) -> Result<Vec<C64>> {
        if self.is_zero() {
            return Err(Error::DegenerateMainPart("zero polynomial has no isolated roots".into()));
        }
        let scale = self.max_abs_coeff();
        let mut origin = 0;
        while origin < self.degree() && self.coeffs[origin].norm() <= 1e-14 * scale {
            origin += 1;
        }
        let reduced = Polynomial::new(self.coeffs[origin..].to_vec());
        let mut roots = vec![C64::new(0.0, 0.0); origin];
        let mut found = reduced.raw_roots();
        for r in found.iter_mut() {
            *r = reduced.polish(*r);
        }
        roots.extend(merge_clusters(found));
        sort_roots(&mut roots);
        Ok(roots)
    }

    fn raw_roots(&self) -> Vec<C64> {
        let d = self.degree();
        match d {
            0 => vec![],
            1 => vec![-self.coeffs[0] / self.coeffs[1]],
            2 => {
                let (c, b, a) = (self.coeffs[0], self.coeffs[1], self.coeffs[2]);
                let disc = (b * b - a * c * 4.0).sqrt();
                let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
                if q.norm() == 0.0 {
                    vec![C64::new(0.0, 0.0); 2]
                } else {
                    vec![q / a, c / q]
                }
            }
            _ => {
                let lead = self.leading();
                let mut m = DMatrix::<C64>::zeros(d, d);
                for i in 1..d {
                    m[(i, i - 1)] = C64::new(1.0, 0.0);
                }
                for i in 0..d {
                    m[(i, d - 1)] = -self.coeffs[i] / lead;
                }
                let (_, t) = m.schur().unpack();
                (0..d).map(|i| t[(i, i)]).collect()
            }
        }
    }

    fn polish(&self, mut z: C64) -> C64 {
        for _ in 0..8 {
            let f = self.eval(z);
            let df = self.eval_deriv(z, 1);
            if df.norm() == 0.0 || f.norm() == 0.0 {
                break;
            }
            let step = f / df;
            let next = z - step;
            if self.eval(next).norm() >= f.norm() {
                break;
            }
            z = next;
        }
        z
    }
}

fn merge_clusters(mut roots: Vec<C64>) -> Vec<C64> {
    let mut out = Vec::with_capacity(roots.len());
    while let Some(r) = roots.pop() {
        let (close, rest): (Vec<C64>, Vec<C64>) =
            roots.into_iter().partition(|s| (s - r).norm() < CLUSTER_TOL * r.norm().max(1.0));
        roots = rest;
        let count = close.len() + 1;
        let mean = (close.iter().sum::<C64>() + r) / count as f64;
        out.extend(std::iter::repeat_n(mean, count));
    }
    out
}

pub(crate) fn sort_roots(roots: &mut [C64]) {
    roots.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap()
            .then(a.re.partial_cmp(&b.re).unwrap())
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn evaluation_and_derivatives() {
        let p = Polynomial::new(vec![c(1.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let z = c(0.5, -1.0);
        assert!((p.eval(z) - (z * z * z * 2.0 - z * 3.0 + 1.0)).norm() < 1e-14);
        assert!((p.eval_deriv(z, 1) - (z * z * 6.0 - 3.0)).norm() < 1e-14);
        assert!((p.eval_deriv(z, 2) - z * 12.0).norm() < 1e-14);
        assert_eq!(p.eval_deriv(z, 4), c(0.0, 0.0));
    }

    #[test]
    fn roots_of_products() {
        let want = vec![c(0.0, 0.0), c(0.0, 0.0), c(1.5, -0.5), c(-2.0, 0.0), c(0.3, 2.0)];
        let p = Polynomial::from_roots(&want, c(2.0, 1.0));
        let got = p.roots().unwrap();
        let mut want_sorted = want.clone();
        sort_roots(&mut want_sorted);
        for (g, w) in got.iter().zip(&want_sorted) {
            assert!((g - w).norm() < 1e-10, "{g} vs {w}");
        }
        for r in &got {
            assert!(p.eval(*r).norm() < 1e-10 * p.max_abs_coeff());
        }
    }

    #[test]
    fn double_root_is_merged() {
        let p = Polynomial::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(-3.0, 0.0)], c(1.0, 0.0));
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], r[1]);
        assert!((r[0] - 1.0).norm() < 1e-7);
    }

    #[test]
    fn division() {
        let a = Polynomial::from_roots(&[c(1.0, 0.0), c(2.0, 1.0), c(-1.0, 0.0)], c(3.0, 0.0));
        let d = Polynomial::from_roots(&[c(0.5, 0.0)], c(1.0, 0.0));
        let (q, r) = a.div_rem(&d).unwrap();
        assert_eq!(q.degree(), 2);
        assert_eq!(r.degree(), 0);
        let back = q.mul(&d).add(&r);
        for (x, y) in back.coeffs().iter().zip(a.coeffs()) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
