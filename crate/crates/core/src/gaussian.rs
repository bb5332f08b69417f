//! Finite sums `Σ P_k · exp(E_k)` with exact prefactors and exponents of degree at most two in
//! `(x, p)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{CompiledScalar, Real, ScalarExpr, Substitution, Var};
use crate::Rational;

/// Terms are keyed by their exact exponent. Two exponents that differ by a nonzero constant
/// are kept as separate keys, so zero-testing is exact only up to such constant offsets; all
/// constructors in this crate produce exponents without constant parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GaussianExpr {
    terms: BTreeMap<ScalarExpr, ScalarExpr>,
}

impl GaussianExpr {
    pub fn zero() -> Self {
        GaussianExpr::default()
    }

    pub fn one() -> Self {
        GaussianExpr::scalar(ScalarExpr::one())
    }

    pub fn scalar(s: ScalarExpr) -> Self {
        GaussianExpr::term(s, ScalarExpr::zero()).expect("zero exponent is admissible")
    }

    /// `exp(arg)`
    pub fn exp(arg: ScalarExpr) -> Result<Self> {
        GaussianExpr::term(ScalarExpr::one(), arg)
    }

    /// `prefactor · exp(arg)`
    pub fn term(prefactor: ScalarExpr, arg: ScalarExpr) -> Result<Self> {
        if arg.xp_degree() > 2 {
            return Err(Error::InvalidParameter(format!(
                "exponent {arg} has (x, p)-degree above two"
            )));
        }
        let mut out = GaussianExpr::zero();
        out.add_term(arg, prefactor);
        Ok(out)
    }

    fn add_term(&mut self, arg: ScalarExpr, pre: ScalarExpr) {
        if pre.is_zero() {
            return;
        }
        match self.terms.get_mut(&arg) {
            Some(existing) => {
                let sum = &*existing + &pre;
                if sum.is_zero() {
                    self.terms.remove(&arg);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(arg, pre);
            }
        }
    }

    /// `(exponent, prefactor)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&ScalarExpr, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The plain scalar when no exponential factor is present.
    pub fn as_scalar(&self) -> Option<ScalarExpr> {
        match self.terms.len() {
            0 => Some(ScalarExpr::zero()),
            1 => {
                let (arg, pre) = self.terms.iter().next().unwrap();
                arg.is_zero().then(|| pre.clone())
            }
            _ => None,
        }
    }

    /// Prefactor and exponent of a single-term expression.
    pub fn single(&self) -> Option<(&ScalarExpr, &ScalarExpr)> {
        if self.terms.len() == 1 {
            let (arg, pre) = self.terms.iter().next().unwrap();
            Some((pre, arg))
        } else {
            None
        }
    }

    fn add_ref(&self, other: &GaussianExpr) -> GaussianExpr {
        let mut out = self.clone();
        for (a, p) in &other.terms {
            out.add_term(a.clone(), p.clone());
        }
        out
    }

    fn neg_ref(&self) -> GaussianExpr {
        GaussianExpr {
            terms: self.terms.iter().map(|(a, p)| (a.clone(), -p)).collect(),
        }
    }

    fn sub_ref(&self, other: &GaussianExpr) -> GaussianExpr {
        self.add(&other.neg())
    }

    fn mul_ref(&self, other: &GaussianExpr) -> GaussianExpr {
        let mut out = GaussianExpr::zero();
        for (a1, p1) in &self.terms {
            for (a2, p2) in &other.terms {
                out.add_term(a1 + a2, p1 * p2);
            }
        }
        out
    }

    pub fn mul_scalar(&self, s: &ScalarExpr) -> GaussianExpr {
        let mut out = GaussianExpr::zero();
        for (a, p) in &self.terms {
            out.add_term(a.clone(), p * s);
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> GaussianExpr {
        self.mul_scalar(&ScalarExpr::constant(k.clone()))
    }

    pub fn try_inverse(&self) -> Result<GaussianExpr> {
        let (pre, arg) = self
            .single()
            .ok_or_else(|| Error::NotInvertible(self.to_string()))?;
        GaussianExpr::term(pre.try_inverse()?, -arg)
    }

    /// `∂_v (P e^E) = (∂_v P + P ∂_v E) e^E`
    pub fn diff(&self, var: Var) -> GaussianExpr {
        let mut out = GaussianExpr::zero();
        for (a, p) in &self.terms {
            let d = p.diff(var) + p * a.diff(var);
            out.add_term(a.clone(), d);
        }
        out
    }

    pub fn depends_on(&self, var: Var) -> bool {
        self.terms
            .iter()
            .any(|(a, p)| a.depends_on(var) || p.depends_on(var))
    }

    pub fn subst(&self, sub: &Substitution) -> Result<GaussianExpr> {
        let mut out = GaussianExpr::zero();
        for (a, p) in &self.terms {
            out.add_term(sub.apply(a)?, sub.apply(p)?);
        }
        Ok(out)
    }

    pub fn eval_with<R: Real>(&self, x: &R, p: &R, t: &R, prec: usize) -> Result<R> {
        let mut total = R::from_rational(&Rational::from_integer(0.into()), prec);
        for (a, pre) in &self.terms {
            let e = a.eval_with(x, p, t, prec)?;
            let v = pre.eval_with(x, p, t, prec)?;
            total = total.add(&v.mul(&e.exp()));
        }
        Ok(total)
    }

    pub fn eval_f64(&self, x: f64, p: f64, t: f64) -> Result<f64> {
        self.eval_with(&x, &p, &t, 53)
    }

    pub fn compile(&self) -> CompiledGaussian {
        CompiledGaussian {
            terms: self
                .terms
                .iter()
                .map(|(a, p)| (a.compile(), p.compile()))
                .collect(),
        }
    }
}

/// Fast `f64` evaluator for a [`GaussianExpr`].
#[derive(Clone, Debug)]
pub struct CompiledGaussian {
    terms: Vec<(CompiledScalar, CompiledScalar)>,
}

impl CompiledGaussian {
    pub fn eval(&self, x: f64, p: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, pre)| pre.eval(x, p, t) * a.eval(x, p, t).exp())
            .sum()
    }
}

impl From<ScalarExpr> for GaussianExpr {
    fn from(s: ScalarExpr) -> Self {
        GaussianExpr::scalar(s)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&GaussianExpr> for &GaussianExpr {
            type Output = GaussianExpr;
            fn $method(self, rhs: &GaussianExpr) -> GaussianExpr {
                GaussianExpr::$inner(self, rhs)
            }
        }
        impl $tr<GaussianExpr> for GaussianExpr {
            type Output = GaussianExpr;
            fn $method(self, rhs: GaussianExpr) -> GaussianExpr {
                GaussianExpr::$inner(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for &GaussianExpr {
    type Output = GaussianExpr;
    fn neg(self) -> GaussianExpr {
        GaussianExpr::neg_ref(self)
    }
}

impl Neg for GaussianExpr {
    type Output = GaussianExpr;
    fn neg(self) -> GaussianExpr {
        GaussianExpr::neg_ref(&self)
    }
}

impl fmt::Display for GaussianExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, p)| {
                if a.is_zero() {
                    p.to_string()
                } else if *p == ScalarExpr::one() {
                    format!("exp({a})")
                } else {
                    format!("({p})*exp({a})")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl std::str::FromStr for GaussianExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        crate::scalar::parse_gaussian(s)
    }
}

impl serde::Serialize for GaussianExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl GaussianExpr {
    /// Exact specialization at `t = t0`.
    pub fn at_t(&self, t0: &Rational) -> Result<GaussianExpr> {
        let mut out = GaussianExpr::zero();
        for (arg, pre) in &self.terms {
            out.add_term(arg.at_t(t0)?, pre.at_t(t0)?);
        }
        Ok(out)
    }
}
