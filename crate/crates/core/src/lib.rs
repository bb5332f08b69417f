//! Exact symmetry algebra, closed-form solutions and numeric cross-checks for the
//! pseudo-diffusion equation `∂_t Q − ¼ ∂_x² Q + (1/(4t²)) ∂_p² Q = 0`.

pub mod check;
pub mod error;
pub mod flows;
pub mod gaussian;
pub mod linalg;
pub mod numeric;
pub mod operator;
pub mod scalar;
pub mod solutions;
pub mod symmetry;

pub use check::{Check, CheckReport};
pub use error::{Error, Result};
pub use gaussian::GaussianExpr;
pub use operator::{psde_operator, DiffOperator};
pub use scalar::{rat, ScalarExpr, Var};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;

pub(crate) fn ser_rational<S: serde::Serializer>(
    q: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}
