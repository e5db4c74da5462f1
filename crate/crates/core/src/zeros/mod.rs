//! Zero localization: argument-principle counting on rectangles, Newton
//! polishing inside trust regions and lattice-aligned zero sequences.

mod contour;
mod localize;
mod refine;
mod sequence;

pub use contour::{winding_count, winding_count_with, Rect, Winding, WindingOptions};
pub use localize::{localize_zeros, zeros_in_rect, LocalizationReport};
pub use refine::{refine_root, refine_zero, Refined};
pub use sequence::{Residuals, ZeroSequence};
