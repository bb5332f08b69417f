//! Linear differential operators `Σ a(x,p,t) ∂_t^i ∂_x^j ∂_p^k` with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::gaussian::GaussianExpr;
use crate::scalar::{ScalarExpr, Var};
use crate::Rational;

/// Derivative orders `(dt, dx, dp)`.
pub type MultiIndex = (u32, u32, u32);

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffOperator {
    terms: BTreeMap<MultiIndex, ScalarExpr>,
}

impl DiffOperator {
    pub fn zero() -> Self {
        DiffOperator::default()
    }

    pub fn identity() -> Self {
        DiffOperator::scalar(ScalarExpr::one())
    }

    /// Multiplication by `s`.
    pub fn scalar(s: ScalarExpr) -> Self {
        DiffOperator::monomial(s, (0, 0, 0))
    }

    pub fn partial(v: Var) -> Self {
        let idx = match v {
            Var::T => (1, 0, 0),
            Var::X => (0, 1, 0),
            Var::P => (0, 0, 1),
        };
        DiffOperator::monomial(ScalarExpr::one(), idx)
    }

    /// `s · ∂^idx`
    pub fn monomial(s: ScalarExpr, idx: MultiIndex) -> Self {
        let mut out = DiffOperator::zero();
        out.add_term(idx, s);
        out
    }

    fn add_term(&mut self, idx: MultiIndex, s: ScalarExpr) {
        if s.is_zero() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(c) => {
                let sum = &*c + &s;
                if sum.is_zero() {
                    self.terms.remove(&idx);
                } else {
                    *c = sum;
                }
            }
            None => {
                self.terms.insert(idx, s);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: MultiIndex) -> ScalarExpr {
        self.terms.get(&idx).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total derivative order.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|(a, b, c)| a + b + c)
            .max()
            .unwrap_or(0)
    }

    pub fn as_scalar(&self) -> Option<ScalarExpr> {
        match self.terms.len() {
            0 => Some(ScalarExpr::zero()),
            1 => self.terms.get(&(0, 0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &DiffOperator) -> DiffOperator {
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(*i, c.clone());
        }
        out
    }

    pub fn neg(&self) -> DiffOperator {
        DiffOperator {
            terms: self.terms.iter().map(|(i, c)| (*i, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &DiffOperator) -> DiffOperator {
        self.add(&other.neg())
    }

    /// Left multiplication by a function: `s·P`.
    pub fn mul_scalar(&self, s: &ScalarExpr) -> DiffOperator {
        let mut out = DiffOperator::zero();
        for (i, c) in &self.terms {
            out.add_term(*i, c * s);
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> DiffOperator {
        self.mul_scalar(&ScalarExpr::constant(k.clone()))
    }

    /// `P ∘ Q`, by the Leibniz rule `∂^α b = Σ_{γ≤α} C(α,γ) (∂^{α-γ} b) ∂^γ`.
    pub fn compose(&self, other: &DiffOperator) -> DiffOperator {
        let mut out = DiffOperator::zero();
        let mut derivs: BTreeMap<(MultiIndex, MultiIndex), ScalarExpr> = BTreeMap::new();
        for (&alpha, a) in &self.terms {
            for (&beta, b) in &other.terms {
                for g0 in 0..=alpha.0 {
                    for g1 in 0..=alpha.1 {
                        for g2 in 0..=alpha.2 {
                            let rest = (alpha.0 - g0, alpha.1 - g1, alpha.2 - g2);
                            let db = derivs
                                .entry((beta, rest))
                                .or_insert_with(|| derivative(b, rest))
                                .clone();
                            if db.is_zero() {
                                continue;
                            }
                            let binom = binomial(alpha.0, g0)
                                * binomial(alpha.1, g1)
                                * binomial(alpha.2, g2);
                            let coeff = (a * &db).scale(&Rational::from_integer(binom));
                            out.add_term((g0 + beta.0, g1 + beta.1, g2 + beta.2), coeff);
                        }
                    }
                }
            }
        }
        out
    }

    /// `[P, Q] = P∘Q − Q∘P`
    pub fn commutator(&self, other: &DiffOperator) -> DiffOperator {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn apply(&self, psi: &GaussianExpr) -> GaussianExpr {
        let mut cache: BTreeMap<MultiIndex, GaussianExpr> = BTreeMap::new();
        cache.insert((0, 0, 0), psi.clone());
        let mut out = GaussianExpr::zero();
        for (&idx, c) in &self.terms {
            let d = derivative_of(&mut cache, idx);
            out = &out + &d.mul_scalar(c);
        }
        out
    }

    pub fn apply_scalar(&self, s: &ScalarExpr) -> ScalarExpr {
        self.apply(&GaussianExpr::scalar(s.clone()))
            .as_scalar()
            .expect("operators map scalars to scalars")
    }

    /// Substitute into every coefficient; the derivative markers are left untouched.
    pub fn map_coefficients(
        &self,
        mut f: impl FnMut(&ScalarExpr) -> Result<ScalarExpr>,
    ) -> Result<DiffOperator> {
        let mut out = DiffOperator::zero();
        for (i, c) in &self.terms {
            out.add_term(*i, f(c)?);
        }
        Ok(out)
    }
}

fn derivative(s: &ScalarExpr, (dt, dx, dp): MultiIndex) -> ScalarExpr {
    let mut out = s.clone();
    for _ in 0..dt {
        out = out.diff(Var::T);
    }
    for _ in 0..dx {
        out = out.diff(Var::X);
    }
    for _ in 0..dp {
        out = out.diff(Var::P);
    }
    out
}

fn derivative_of(cache: &mut BTreeMap<MultiIndex, GaussianExpr>, idx: MultiIndex) -> GaussianExpr {
    if let Some(v) = cache.get(&idx) {
        return v.clone();
    }
    let (prev, var) = if idx.2 > 0 {
        ((idx.0, idx.1, idx.2 - 1), Var::P)
    } else if idx.1 > 0 {
        ((idx.0, idx.1 - 1, idx.2), Var::X)
    } else {
        ((idx.0 - 1, idx.1, idx.2), Var::T)
    };
    let v = derivative_of(cache, prev).diff(var);
    cache.insert(idx, v.clone());
    v
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut out = BigInt::from(1);
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Sign convention for the second variable of [`GeneralizedL`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Orientation {
    /// `∂_t − a ∂_x² + b ∂_p²`, mirroring the pseudo-diffusion operator.
    Psd,
    /// `∂_t − a ∂_x² − b ∂_y²`, the general form with `y` stored in the `p` slot.
    Gen,
}

/// `∂_t − a(t) ∂_x² ∓ b(t) ∂_y²` with `y` in the `p` slot.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedL {
    pub a: ScalarExpr,
    pub b: ScalarExpr,
    pub orientation: Orientation,
}

impl GeneralizedL {
    pub fn new(a: ScalarExpr, b: ScalarExpr, orientation: Orientation) -> Result<Self> {
        for (name, c) in [("a", &a), ("b", &b)] {
            if !c.is_t_only() {
                return Err(Error::InvalidCoefficient(format!(
                    "{name} = {c} depends on x or p"
                )));
            }
        }
        Ok(GeneralizedL { a, b, orientation })
    }

    pub fn operator(&self) -> DiffOperator {
        let sign = match self.orientation {
            Orientation::Psd => ScalarExpr::one(),
            Orientation::Gen => ScalarExpr::int(-1),
        };
        DiffOperator::partial(Var::T)
            .add(&DiffOperator::monomial(-&self.a, (0, 2, 0)))
            .add(&DiffOperator::monomial(sign * &self.b, (0, 0, 2)))
    }
}

/// `∂_t − a ∂_x² − b ∂_y²` with `y` in the `p` slot.
pub fn general_operator(a: &ScalarExpr, b: &ScalarExpr) -> Result<DiffOperator> {
    Ok(GeneralizedL::new(a.clone(), b.clone(), Orientation::Gen)?.operator())
}

/// `L = ∂_t − ¼ ∂_x² + (1/(4t²)) ∂_p²`
pub fn psde_operator() -> DiffOperator {
    GeneralizedL {
        a: ScalarExpr::frac(1, 4),
        b: ScalarExpr::monomial(Rational::new(1.into(), 4.into()), 0, 0, 0)
            * ScalarExpr::t().pow_int(-2).expect("t is invertible"),
        orientation: Orientation::Psd,
    }
    .operator()
}

fn fmt_coefficient(c: &ScalarExpr) -> (bool, String) {
    let s = c.to_string();
    let body = s.strip_prefix('-').unwrap_or(&s);
    if body.contains(" + ") || body.contains(" - ") {
        (false, format!("({s})"))
    } else {
        (s.starts_with('-'), body.to_string())
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((dt, dx, dp), c)) in self.terms.iter().enumerate() {
            let (neg, coeff) = fmt_coefficient(c);
            let mut factors = Vec::new();
            for (name, e) in [("Dt", dt), ("Dx", dx), ("Dp", dp)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            let body = if factors.is_empty() {
                coeff
            } else if coeff == "1" {
                factors.join("*")
            } else {
                format!("{coeff}*{}", factors.join("*"))
            };
            match (n, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for DiffOperator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        crate::scalar::parse_operator(s)
    }
}

impl serde::Serialize for DiffOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(s: &str) -> DiffOperator {
        s.parse().unwrap()
    }

    #[test]
    fn heisenberg_relation() {
        let d = DiffOperator::partial(Var::X);
        let x = DiffOperator::scalar(ScalarExpr::x());
        assert_eq!(d.compose(&x), op("x*Dx + 1"));
    }

    #[test]
    fn second_order_leibniz() {
        let f = DiffOperator::scalar(ScalarExpr::x().pow(2));
        let d2 = op("Dx^2");
        assert_eq!(d2.compose(&f), op("x^2*Dx^2 + 4*x*Dx + 2"));
        // [∂x², f] ψ = f_xx ψ + 2 f_x ψ_x with ψ = x³
        let psi = GaussianExpr::scalar(ScalarExpr::x().pow(3));
        let lhs = d2.commutator(&f).apply(&psi);
        let rhs: GaussianExpr = "2*x^3 + 2*2*x*3*x^2".parse().unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn l_commutes_to_one_with_t() {
        let l = psde_operator();
        let t = DiffOperator::scalar(ScalarExpr::t());
        assert_eq!(l.commutator(&t), DiffOperator::identity());
    }

    #[test]
    fn psde_action_on_simple_functions() {
        let l = psde_operator();
        assert!(l.apply_scalar(&ScalarExpr::one()).is_zero());
        assert!(l.apply_scalar(&"4*x^2 + 2*t".parse().unwrap()).is_zero());
        assert_eq!(
            l.apply_scalar(&"x^2 + t".parse().unwrap()),
            ScalarExpr::frac(1, 2)
        );
        assert!(l.apply_scalar(&"p^2 + 1/2*t^-1".parse().unwrap()).is_zero());
    }

    #[test]
    fn general_forms() {
        let std = general_operator(&ScalarExpr::one(), &ScalarExpr::int(-1)).unwrap();
        assert_eq!(std, op("Dt - Dx^2 + Dp^2"));
        let quarter =
            general_operator(&ScalarExpr::frac(1, 4), &"-1/4*t^-2".parse().unwrap()).unwrap();
        assert_eq!(quarter, psde_operator());
        assert!(general_operator(&ScalarExpr::x(), &ScalarExpr::one()).is_err());
    }

    #[test]
    fn display_round_trips() {
        let l = psde_operator();
        assert_eq!(op(&l.to_string()), l);
        let a = op("t^2*Dt + t*x*Dx + x^2 + 1/2*t");
        assert_eq!(op(&a.to_string()), a);
        assert_eq!(a.to_string(), op(&a.to_string()).to_string());
    }
}
