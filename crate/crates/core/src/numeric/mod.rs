//! Floating-point verification: adaptive quadrature, finite-difference residuals, delta-sequence
//! limits and the invariance of the squeezed marginals.

pub mod delta;
pub mod invariance;
pub mod quadrature;
pub mod residual;

pub use delta::*;
pub use invariance::*;
pub use quadrature::*;
pub use residual::*;
