use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::model::{mode_transform, FourierTail, MainPart};
use crate::zeros::ZeroSequence;
use crate::{Error, Result, C64};

/// Zeros closer than this (relative) are treated as one multiple node.
const NODE_TOL: f64 = 1e-7;
const MAX_MULTIPLICITY: usize = 3;
const FRAME_FLOOR: f64 = 1e-8;

/// Linear equations Σ_j c_j·F_j^{(ν)}(z_k) = −S^{(ν)}(z_k) for the tail
/// coefficients c_{−M..M}, one row per distinct zero and derivative order
/// below its multiplicity.
#[derive(Clone, Debug)]
pub struct MomentSystem {
    b: f64,
    m: usize,
    nodes: Vec<(C64, usize)>,
    /// (node index, derivative order) of every row.
    labels: Vec<(usize, usize)>,
    matrix: DMatrix<C64>,
    rhs: DVector<C64>,
}

/// Squared extreme singular values of the matrix scaled by 1/(2b).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameEstimate {
    pub m_est: f64,
    pub big_m_est: f64,
}

impl FrameEstimate {
    pub fn ratio(&self) -> f64 {
        self.m_est / self.big_m_est
    }
}

#[derive(Clone, Debug)]
pub struct TailRecovery {
    pub tail: FourierTail,
    /// ‖A c − rhs‖.
    pub residual_norm: f64,
    pub rhs_norm: f64,
    pub frame: FrameEstimate,
}

/// Assembles the system from the zeros with 1 ≤ n ≤ K (all positive
/// indices when `k` is `None`). Entries with n ≤ 0 never enter.
pub fn build_moment_system(zeros: &ZeroSequence, main: &MainPart, m: usize, k: Option<usize>) -> Result<MomentSystem> {
    let pos = zeros.positive();
    let k = k.unwrap_or(pos.len());
    if k > pos.len() {
        return Err(Error::InsufficientZeros { needed: k, got: pos.len() });
    }
    MomentSystem::from_nodes(main, m, group_nodes(&pos[..k])?)
}

/// Collapses coincident zeros into (node, multiplicity), keeping the order
/// of first appearance.
fn group_nodes(zs: &[C64]) -> Result<Vec<(C64, usize)>> {
    let mut nodes: Vec<(C64, usize)> = Vec::new();
    for &z in zs {
        let tol = NODE_TOL * z.norm().max(1.0);
        match nodes.iter_mut().find(|(w, _)| (w - z).norm() < tol) {
            Some(node) => node.1 += 1,
            None => nodes.push((z, 1)),
        }
    }
    if let Some(&(_, mult)) = nodes.iter().find(|(_, m)| *m > MAX_MULTIPLICITY) {
        return Err(Error::UnsupportedMultiplicity(mult));
    }
    Ok(nodes)
}

impl MomentSystem {
    /// Rows for explicitly given nodes. Repeated nodes are not merged.
    pub fn from_nodes(main: &MainPart, m: usize, nodes: Vec<(C64, usize)>) -> Result<Self> {
        let b = main.type_b();
        if let Some(&(_, mult)) = nodes.iter().find(|(_, mu)| *mu > MAX_MULTIPLICITY || *mu == 0) {
            return Err(Error::UnsupportedMultiplicity(mult));
        }
        let labels: Vec<(usize, usize)> =
            nodes.iter().enumerate().flat_map(|(i, &(_, mult))| (0..mult).map(move |nu| (i, nu))).collect();
        let cols = 2 * m + 1;
        if labels.len() < cols {
            return Err(Error::InsufficientZeros { needed: cols, got: labels.len() });
        }
        let rows: Vec<(Vec<C64>, C64)> = labels
            .par_iter()
            .map(|&(i, nu)| {
                let z = nodes[i].0;
                let row = (-(m as i64)..=m as i64).map(|j| mode_transform(b, j, z, nu)).collect();
                (row, -main.eval_unchecked(z, nu))
            })
            .collect();
        let matrix = DMatrix::from_fn(labels.len(), cols, |r, c| rows[r].0[c]);
        let rhs = DVector::from_iterator(labels.len(), rows.iter().map(|r| r.1));
        Ok(MomentSystem { b, m, nodes, labels, matrix, rhs })
    }

    pub fn type_b(&self) -> f64 {
        self.b
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    pub fn nodes(&self) -> &[(C64, usize)] {
        &self.nodes
    }

    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<C64> {
        &self.rhs
    }

    /// Number of equations.
    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    /// Same system with rows reordered: row i of the result is row
    /// `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.rows()];
        if perm.len() != self.rows() || perm.iter().any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput("not a permutation of the rows".into()));
        }
        let cols = self.matrix.ncols();
        Ok(MomentSystem {
            b: self.b,
            m: self.m,
            nodes: self.nodes.clone(),
            labels: perm.iter().map(|&p| self.labels[p]).collect(),
            matrix: DMatrix::from_fn(perm.len(), cols, |r, c| self.matrix[(perm[r], c)]),
            rhs: DVector::from_iterator(perm.len(), perm.iter().map(|&p| self.rhs[p])),
        })
    }
}

pub fn frame_bounds_estimate(system: &MomentSystem) -> FrameEstimate {
    let scaled = system.matrix.map(|v| v / (2.0 * system.b));
    let sv = scaled.singular_values();
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sv.iter().copied().fold(0.0, f64::max);
    FrameEstimate { m_est: lo * lo, big_m_est: hi * hi }
}

/// Least-squares solve by Householder QR.
pub fn invert_to_tail(system: &MomentSystem) -> Result<TailRecovery> {
    let frame = frame_bounds_estimate(system);
    if !(frame.m_est > FRAME_FLOOR) {
        return Err(Error::IllConditioned { m_est: frame.m_est });
    }
    let qr = system.matrix.clone().qr();
    let qh_b = qr.q().adjoint() * &system.rhs;
    let sol = qr
        .r()
        .solve_upper_triangular(&qh_b)
        .ok_or(Error::IllConditioned { m_est: frame.m_est })?;
    let residual_norm = (&system.matrix * &sol - &system.rhs).norm();
    let tail = FourierTail::from_coeffs(system.b, sol.iter().copied().collect())?;
    Ok(TailRecovery { tail, residual_norm, rhs_norm: system.rhs.norm(), frame })
}
