//! Irrational part of a term: a square-free radical, a half-integer power of π and a set of
//! square roots of linear factors in `t`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::Rational;

/// Which way a linear factor is written so that it is positive on the working window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orient {
    /// `t + b`
    Plus,
    /// `b - t`
    Minus,
}

/// `√(t + b)` or `√(b - t)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Root {
    pub orient: Orient,
    pub b: Rational,
}

impl Root {
    pub fn plus(b: Rational) -> Self {
        Root {
            orient: Orient::Plus,
            b,
        }
    }

    pub fn minus(b: Rational) -> Self {
        Root {
            orient: Orient::Minus,
            b,
        }
    }

    /// The shift `s` with the factor vanishing at `t = -s`.
    pub fn shift(&self) -> Rational {
        match self.orient {
            Orient::Plus => self.b.clone(),
            Orient::Minus => -self.b.clone(),
        }
    }

    /// The squared root as a rational function.
    pub fn square(&self) -> RatFunc {
        let lin = RatFunc::from_poly(Poly::linear_t(&self.shift()));
        match self.orient {
            Orient::Plus => lin,
            Orient::Minus => lin.neg(),
        }
    }

    /// Value of the radicand at `t`.
    pub fn radicand_at(&self, t: &Rational) -> Rational {
        match self.orient {
            Orient::Plus => t + &self.b,
            Orient::Minus => &self.b - t,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sig {
    /// Square-free positive integer `r`, standing for `√r`.
    pub radicand: BigInt,
    /// `k` in `π^{k/2}`.
    pub pi_half: i32,
    pub roots: BTreeSet<Root>,
}

impl Default for Sig {
    fn default() -> Self {
        Sig::one()
    }
}

impl Sig {
    pub fn one() -> Self {
        Sig {
            radicand: BigInt::one(),
            pi_half: 0,
            roots: BTreeSet::new(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.radicand.is_one() && self.pi_half == 0 && self.roots.is_empty()
    }

    pub fn is_t_free(&self) -> bool {
        self.roots.is_empty()
    }

    /// Product of two signatures: the new signature and the rational-function cofactor
    /// produced by squared radicals and squared roots.
    pub fn mul(&self, other: &Sig) -> (Sig, RatFunc) {
        let g = self.radicand.gcd(&other.radicand);
        let radicand = (&self.radicand / &g) * (&other.radicand / &g);
        let mut factor = RatFunc::from_poly(Poly::constant(Rational::from_integer(g)));
        let mut roots = BTreeSet::new();
        for r in self.roots.symmetric_difference(&other.roots) {
            roots.insert(r.clone());
        }
        for r in self.roots.intersection(&other.roots) {
            factor = factor.mul(&r.square());
        }
        (
            Sig {
                radicand,
                pi_half: self.pi_half + other.pi_half,
                roots,
            },
            factor,
        )
    }

    /// `1/sig` written as `sig' · cofactor`.
    pub fn inverse(&self) -> (Sig, RatFunc) {
        let mut factor = RatFunc::from_poly(Poly::constant(Rational::new(
            BigInt::one(),
            self.radicand.clone(),
        )));
        for r in &self.roots {
            factor = factor.mul(&r.square().inverse().expect("linear factor is invertible"));
        }
        (
            Sig {
                radicand: self.radicand.clone(),
                pi_half: -self.pi_half,
                roots: self.roots.clone(),
            },
            factor,
        )
    }
}

/// Split a positive rational `q` as `c·√r` with `r` square-free: returns `(c, r)`.
pub fn sqrt_rational(q: &Rational) -> Option<(Rational, BigInt)> {
    if q.is_negative() {
        return None;
    }
    if q.is_zero() {
        return Some((Rational::zero(), BigInt::one()));
    }
    // √(n/d) = √(n d) / d
    let nd = q.numer() * q.denom();
    let (outside, inside) = squarefree_split(&nd)?;
    Some((Rational::new(outside, q.denom().clone()), inside))
}

/// `n = a² · r` with `r` square-free, by trial division.
fn squarefree_split(n: &BigInt) -> Option<(BigInt, BigInt)> {
    if n.bits() > 64 {
        return None;
    }
    let mut m: u128 = n.try_into().ok()?;
    let mut outside: u128 = 1;
    let mut inside: u128 = 1;
    let mut d: u128 = 2;
    while d * d <= m {
        let mut e = 0;
        while m.is_multiple_of(d) {
            m /= d;
            e += 1;
        }
        outside *= d.pow(e / 2);
        if e % 2 == 1 {
            inside *= d;
        }
        d += 1;
    }
    inside *= m;
    Some((BigInt::from(outside), BigInt::from(inside)))
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.orient {
            Orient::Plus if self.b.is_zero() => write!(f, "t^1/2"),
            Orient::Plus if self.b.is_negative() => write!(f, "(t-{})^1/2", -self.b.clone()),
            Orient::Plus => write!(f, "(t+{})^1/2", self.b),
            Orient::Minus => write!(f, "({}-t)^1/2", self.b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_free_parts() {
        let (c, r) = sqrt_rational(&Rational::new(12.into(), 5.into())).unwrap();
        // √(12/5) = √60 / 5 = 2√15 / 5
        assert_eq!(c, Rational::new(2.into(), 5.into()));
        assert_eq!(r, BigInt::from(15));
        assert!(sqrt_rational(&Rational::from_integer((-2).into())).is_none());
    }

    #[test]
    fn product_folds_common_roots() {
        let a = Sig {
            radicand: 6.into(),
            pi_half: 1,
            roots: BTreeSet::from([Root::plus(Rational::one())]),
        };
        let (s, k) = a.mul(&a);
        assert!(s.is_one() || s.pi_half == 2);
        assert_eq!(s.radicand, BigInt::one());
        assert!(s.roots.is_empty());
        // 6 (t + 1)
        assert_eq!(
            k,
            RatFunc::from_poly(
                Poly::linear_t(&Rational::one()).scale(&Rational::from_integer(6.into()))
            )
        );
    }
}
