//! The function class: sine-type base, polynomial factor, Fourier tail and
//! their combination θ = P_N·S₀ + F[w].

mod base;
mod poly;
mod tail;
mod theta;

pub use base::{CustomBase, SampleGrid, SineTypeBase, SineTypeEstimate};
pub use poly::Polynomial;
pub use tail::{mode_transform, FourierTail};
pub use theta::{LeadingData, MainPart, ThetaFunction};
pub(crate) use theta::mu_of;

/// Highest derivative order supported by the public evaluators.
pub const MAX_DERIV: usize = 2;
