use crate::model::MainPart;
use crate::{Error, Result, C64};

/// Zeros z_n indexed from `first` and aligned with the lattice z_n⁰ of a
/// main part. Multiple zeros appear as repeated entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSequence {
    first: i64,
    degree: usize,
    zeros: Vec<C64>,
    lattice: Vec<C64>,
}

/// ϰ_n = μ_nᴺ(z_n − z_n⁰) and its ℓ₂ summaries.
#[derive(Clone, Debug, PartialEq)]
pub struct Residuals {
    pub first: i64,
    pub kappa: Vec<C64>,
    pub l2_norm: f64,
    /// tail_profile[i] = Σ_{j > i} |ϰ_{first+j}|².
    pub tail_profile: Vec<f64>,
}

impl Residuals {
    /// Σ_{n > n0} |ϰ_n|².
    pub fn tail_sum_beyond(&self, n0: i64) -> f64 {
        let i = n0 - self.first;
        if i < 0 {
            self.l2_norm * self.l2_norm
        } else {
            self.tail_profile.get(i as usize).copied().unwrap_or(0.0)
        }
    }
}

impl ZeroSequence {
    /// Full sequence starting at the first lattice index 1 − N.
    pub fn new(main: &MainPart, zeros: Vec<C64>) -> Self {
        Self::with_first(main, main.first_index(), zeros).expect("first index is valid")
    }

    /// Sequence whose first entry carries index `first` (e.g. 1 for the
    /// zeros used by the moment system).
    pub fn with_first(main: &MainPart, first: i64, zeros: Vec<C64>) -> Result<Self> {
        if first < main.first_index() {
            return Err(Error::IndexOutOfRange { index: first, first: main.first_index() });
        }
        let lattice = (0..zeros.len() as i64).map(|i| main.lattice_zero_unchecked(first + i)).collect();
        Ok(ZeroSequence { first, degree: main.degree(), zeros, lattice })
    }

    /// The unperturbed lattice itself up to index `n_max`.
    pub fn lattice(main: &MainPart, n_max: i64) -> Self {
        let first = main.first_index();
        let zeros = (first..=n_max.max(first - 1)).map(|n| main.lattice_zero_unchecked(n)).collect();
        Self::new(main, zeros)
    }

    /// Inverse of [`ZeroSequence::residuals`]: z_n = z_n⁰ + ϰ_n/μ_nᴺ.
    pub fn from_kappa(main: &MainPart, first: i64, kappa: &[C64]) -> Result<Self> {
        let n = main.degree() as u32;
        let zeros = kappa
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let z0 = main.lattice_zero(first + i as i64)?;
                Ok(z0 + k / crate::model::mu_of(z0).powu(n))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_first(main, first, zeros)
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    /// Last index carried by the sequence.
    pub fn last(&self) -> i64 {
        self.first + self.zeros.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn lattice_points(&self) -> &[C64] {
        &self.lattice
    }

    pub fn get(&self, n: i64) -> Option<C64> {
        self.position(n).map(|i| self.zeros[i])
    }

    pub fn lattice_at(&self, n: i64) -> Option<C64> {
        self.position(n).map(|i| self.lattice[i])
    }

    fn position(&self, n: i64) -> Option<usize> {
        let i = n - self.first;
        (i >= 0 && (i as usize) < self.zeros.len()).then_some(i as usize)
    }

    /// (n, z_n) pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.zeros.iter().enumerate().map(move |(i, z)| (self.first + i as i64, *z))
    }

    /// Zeros with n ≥ 1.
    pub fn positive(&self) -> &[C64] {
        let skip = (1 - self.first).max(0) as usize;
        &self.zeros[skip.min(self.zeros.len())..]
    }

    /// Zeros with n ≤ 0.
    pub fn head(&self) -> &[C64] {
        let take = (1 - self.first).max(0) as usize;
        &self.zeros[..take.min(self.zeros.len())]
    }

    /// Same sequence with the entries n ≤ 0 replaced.
    pub fn with_head(&self, head: &[C64]) -> Result<Self> {
        let expected = (1 - self.first).max(0) as usize;
        if head.len() != expected {
            return Err(Error::InvalidInput(format!("head needs {expected} zeros, got {}", head.len())));
        }
        let mut out = self.clone();
        out.zeros[..expected].copy_from_slice(head);
        Ok(out)
    }

    /// Drops indices above `n_max`.
    pub fn truncated(&self, n_max: i64) -> Self {
        let keep = (n_max - self.first + 1).clamp(0, self.zeros.len() as i64) as usize;
        ZeroSequence {
            first: self.first,
            degree: self.degree,
            zeros: self.zeros[..keep].to_vec(),
            lattice: self.lattice[..keep].to_vec(),
        }
    }

    pub fn residuals(&self) -> Residuals {
        let n = self.degree as u32;
        let kappa: Vec<C64> = self
            .zeros
            .iter()
            .zip(&self.lattice)
            .map(|(z, z0)| crate::model::mu_of(*z0).powu(n) * (z - z0))
            .collect();
        let mut tail_profile = vec![0.0; kappa.len()];
        let mut acc = 0.0;
        for i in (0..kappa.len()).rev() {
            tail_profile[i] = acc;
            acc += kappa[i].norm_sqr();
        }
        Residuals { first: self.first, kappa, l2_norm: acc.sqrt(), tail_profile }
    }
}
