//! The nine point-symmetry generators, as vector fields and as first-order operators.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::DiffOperator;
use crate::scalar::{ScalarExpr, Var};
use crate::Rational;

/// `α ∂_t + β ∂_x + γ ∂_p + η u ∂_u` with coefficients independent of `u`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VectorField {
    pub alpha: ScalarExpr,
    pub beta: ScalarExpr,
    pub gamma: ScalarExpr,
    pub eta: ScalarExpr,
}

impl VectorField {
    pub fn new(alpha: ScalarExpr, beta: ScalarExpr, gamma: ScalarExpr, eta: ScalarExpr) -> Self {
        VectorField {
            alpha,
            beta,
            gamma,
            eta,
        }
    }

    pub fn zero() -> Self {
        VectorField::default()
    }

    pub fn components(&self) -> [&ScalarExpr; 4] {
        [&self.alpha, &self.beta, &self.gamma, &self.eta]
    }

    fn from_components(c: [ScalarExpr; 4]) -> Self {
        let [alpha, beta, gamma, eta] = c;
        VectorField::new(alpha, beta, gamma, eta)
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    /// Derivative of `f(x,p,t)` along the base part `α ∂_t + β ∂_x + γ ∂_p`.
    pub fn derive(&self, f: &ScalarExpr) -> ScalarExpr {
        &self.alpha * f.diff(Var::T) + &self.beta * f.diff(Var::X) + &self.gamma * f.diff(Var::P)
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        let [a, b, c, d] = self.components();
        let [e, f, g, h] = o.components();
        VectorField::new(a + e, b + f, c + g, d + h)
    }

    pub fn scale(&self, k: &Rational) -> VectorField {
        VectorField::from_components(self.components().map(|c| c.scale(k)))
    }

    /// Lie bracket; the `u ∂_u` part brackets as `X(η_Y) − Y(η_X)`.
    pub fn bracket(&self, o: &VectorField) -> VectorField {
        let a = self.components();
        let b = o.components();
        VectorField::from_components(std::array::from_fn(|k| self.derive(b[k]) - o.derive(a[k])))
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [
            (&self.alpha, "Dt"),
            (&self.beta, "Dx"),
            (&self.gamma, "Dp"),
            (&self.eta, "u*Du"),
        ]
        .iter()
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, d)| {
            if c.is_constant() && c.constant_value() == Some(Rational::from_integer(1.into())) {
                d.to_string()
            } else {
                format!("({c})*{d}")
            }
        })
        .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `A_i = SIGNS[i-1] · vf_to_operator(X_i)`.
pub const SIGNS: [i64; 9] = [1, 1, 1, 1, 1, -1, 1, 1, -1];

/// Operator form `α ∂_t + β ∂_x + γ ∂_p − η`: replacing `u ∂_u` by `−1` turns the
/// vector-field bracket into the operator commutator.
pub fn vf_to_operator(v: &VectorField) -> DiffOperator {
    DiffOperator::monomial(v.alpha.clone(), (1, 0, 0))
        .add(&DiffOperator::monomial(v.beta.clone(), (0, 1, 0)))
        .add(&DiffOperator::monomial(v.gamma.clone(), (0, 0, 1)))
        .add(&DiffOperator::scalar(-&v.eta))
}

fn check_index(i: usize) -> Result<()> {
    if (1..=9).contains(&i) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange(i))
    }
}

fn e(src: &str) -> ScalarExpr {
    src.parse().expect("generator coefficient")
}

/// `X_i` for `i ∈ 1..=9`.
pub fn make_generator_x(i: usize) -> Result<VectorField> {
    check_index(i)?;
    let z = ScalarExpr::zero;
    let one = ScalarExpr::one;
    Ok(match i {
        1 => VectorField::new(one(), z(), e("-p*t^-1"), e("p^2 + 1/2*t^-1")),
        2 => VectorField::new(e("2*t"), e("x"), e("-p"), z()),
        3 => VectorField::new(e("t^2"), e("x*t"), z(), e("-x^2 - 1/2*t")),
        4 => VectorField::new(z(), e("t*p"), e("x*t^-1"), e("-2*x*p")),
        5 => VectorField::new(z(), e("t"), z(), e("-2*x")),
        6 => VectorField::new(z(), z(), e("-t^-1"), e("2*p")),
        7 => VectorField::new(z(), one(), z(), z()),
        8 => VectorField::new(z(), z(), one(), z()),
        _ => VectorField::new(z(), z(), z(), one()),
    })
}

/// `A_i` for `i ∈ 1..=9`, obtained from `X_i` through [`vf_to_operator`] and [`SIGNS`].
pub fn make_generator_a(i: usize) -> Result<DiffOperator> {
    let x = make_generator_x(i)?;
    Ok(vf_to_operator(&x).scale(&Rational::from_integer(SIGNS[i - 1].into())))
}

pub fn a_basis() -> Vec<DiffOperator> {
    (1..=9)
        .map(|i| make_generator_a(i).expect("index in range"))
        .collect()
}

pub fn x_basis() -> Vec<VectorField> {
    (1..=9)
        .map(|i| make_generator_x(i).expect("index in range"))
        .collect()
}

pub fn basis_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}
