//! Monte-Carlo estimates of the Lipschitz constant of the zeros → tail
//! map, together with the Parseval, line-shift and sampled-ℓ₂ checks that
//! relate the tail norm to its transform.

mod ball;
mod sampled_l2;
mod lipschitz;
mod parseval;

pub use ball::{sample_ball, BallSpec};
pub use sampled_l2::{sampled_l2_check, SampledL2Report};
pub use lipschitz::{empirical_lipschitz, stability_ratio, LipschitzEstimate, StabilityRecord};
pub use parseval::{line_integral, line_shift_check, parseval_l2, LineIntegral, LineShiftReport, ParsevalReport};
