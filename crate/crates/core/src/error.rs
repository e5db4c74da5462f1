use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures of the numerical pipeline.
///
/// Variant names double as the machine-readable error names printed by the
/// command line driver, see [`Error::name`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("derivative order {0} is not supported (max 2)")]
    UnsupportedDerivOrder(usize),
    #[error("lattice index {index} out of range (first index {first})")]
    IndexOutOfRange { index: i64, first: i64 },
    #[error("main part is degenerate: {0}")]
    DegenerateMainPart(String),
    #[error("zero on or near the contour: min |f| = {min_abs:e}, scale {scale:e}")]
    BoundaryTooClose { min_abs: f64, scale: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("Newton iterate left the trust region of radius {radius:e} around {center}")]
    LeftTrustRegion { center: String, radius: f64 },
    #[error("maximum number of iterations reached ({0})")]
    MaxIterations(usize),
    #[error("winding count {found} disagrees with lattice count {expected}")]
    CountMismatch { found: i64, expected: i64 },
    #[error("product tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailBoundExceeded { bound: f64, tol: f64 },
    #[error("evaluation point is within {0:e} of a lattice point")]
    NearLatticePole(f64),
    #[error("truncations differ by {diff:e} (tolerance {tol:e})")]
    SlowConvergence { diff: f64, tol: f64 },
    #[error("need at least {needed} zeros, got {got}")]
    InsufficientZeros { needed: usize, got: usize },
    #[error("moment system is ill conditioned: m_est = {m_est:e}")]
    IllConditioned { m_est: f64 },
    #[error("multiplicity {0} exceeds the supported maximum of 3")]
    UnsupportedMultiplicity(usize),
    #[error("polynomial part fit diverged: {0}")]
    FitDiverged(String),
    #[error("quadrature tail remainder {bound:e} too large at window {window}")]
    QuadratureTailTooLarge { bound: f64, window: f64 },
    #[error("eigenvalue {index} = {value} lies on the branch cut")]
    BranchAmbiguity { index: usize, value: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::UnsupportedDerivOrder(_) => "UnsupportedDerivOrder",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DegenerateMainPart(_) => "DegenerateMainPart",
            Error::BoundaryTooClose { .. } => "BoundaryTooClose",
            Error::NoConvergence(_) => "NoConvergence",
            Error::LeftTrustRegion { .. } => "LeftTrustRegion",
            Error::MaxIterations(_) => "MaxIterations",
            Error::CountMismatch { .. } => "CountMismatch",
            Error::TailBoundExceeded { .. } => "TailBoundExceeded",
            Error::NearLatticePole(_) => "NearLatticePole",
            Error::SlowConvergence { .. } => "SlowConvergence",
            Error::InsufficientZeros { .. } => "InsufficientZeros",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::UnsupportedMultiplicity(_) => "UnsupportedMultiplicity",
            Error::FitDiverged(_) => "FitDiverged",
            Error::QuadratureTailTooLarge { .. } => "QuadratureTailTooLarge",
            Error::BranchAmbiguity { .. } => "BranchAmbiguity",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// True for input validation problems, false for numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::UnsupportedDerivOrder(_)
                | Error::IndexOutOfRange { .. }
                | Error::InsufficientZeros { .. }
        )
    }
}
