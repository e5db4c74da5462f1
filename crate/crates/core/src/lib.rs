//! Numerical laboratory for entire functions of the form
//!
//! ```text
//! θ(z) = P_N(z)·S₀(z) + ∫₋ᵦᵇ w(x) e^{izx} dx
//! ```
//!
//! where `S₀` is a sine-type function of exponential type `b` with
//! asymptotically separated zeros, `P_N` a polynomial of degree `N` and
//! `w ∈ L₂(−b, b)` a finite trigonometric tail.
//!
//! The crate covers the whole pipeline: exact evaluation ([`model`]),
//! argument-principle zero localization ([`zeros`]), reconstruction of the
//! function and its tail from the zeros ([`reconstruction`]), Monte-Carlo
//! estimation of the Lipschitz constant of that reconstruction
//! ([`stability`]) and adapters for Sturm–Liouville characteristic
//! functions ([`sturm_liouville`]).

pub mod error;
pub mod io;
pub mod model;
pub mod quadrature;
pub mod reconstruction;
pub mod stability;
pub mod sturm_liouville;
pub mod zeros;

pub use error::{Error, Result};
pub use zeros::{Rect, ZeroSequence};
pub use model::{
    FourierTail, LeadingData, MainPart, Polynomial, SineTypeBase, SineTypeEstimate, ThetaFunction,
};


/// Double precision complex number used throughout the crate.
pub type C64 = num_complex::Complex<f64>;
