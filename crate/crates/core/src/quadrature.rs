//! Composite Gauss–Legendre quadrature.

use std::f64::consts::PI;

use crate::C64;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on [−1, 1], nodes by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫ₐᵇ f over `panels` equal panels.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, panels: usize, f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + 0.5 * h * x);
            }
            total += 0.5 * h * s;
        }
        total
    }

    pub fn integrate_complex<F: Fn(f64) -> C64>(&self, a: f64, b: f64, panels: usize, f: F) -> C64 {
        let re = self.integrate(a, b, panels, |x| f(x).re);
        let im = self.integrate(a, b, panels, |x| f(x).im);
        C64::new(re, im)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        let v = gl.integrate(-1.0, 2.0, 1, |x| x.powi(15) - 3.0 * x.powi(4));
        let exact = (2f64.powi(16) - 1.0) / 16.0 - 3.0 * (2f64.powi(5) + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-10 * exact.abs());
        assert!((gl.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn smooth_integrand() {
        let gl = GaussLegendre::new(16);
        let v = gl.integrate(0.0, PI, 4, f64::sin);
        assert!((v - 2.0).abs() < 1e-14);
    }
}
