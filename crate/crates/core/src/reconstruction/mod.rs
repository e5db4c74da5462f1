//! Rebuilding θ from its zeros: product representations, the moment
//! system that determines the tail, completion of a sequence missing its
//! first N zeros and the polynomial correction for an arbitrary head.

mod complete;
mod head_correction;
mod moments;
mod product;

pub use complete::{complete_zeros, complete_with_system, head_search_rect, Completion};
pub use head_correction::{head_correction, HeadCorrection};
pub use moments::{
    build_moment_system, frame_bounds_estimate, invert_to_tail, FrameEstimate, MomentSystem, TailRecovery,
};
pub use product::{product_eval_hadamard, product_eval_ratio, HadamardEval, RatioEval};
