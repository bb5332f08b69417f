//! Coordinate substitutions `f(x, p, t) ↦ f(X, P, T)` with `X`, `P` linear in `x`, `p` and `T` a
//! fractional-linear map of `t`.

use num_traits::{One, Signed, Zero};

use super::sig::Orient;
use super::{poly::Var, RatFunc, Root, ScalarExpr, Sig};
use crate::error::{Error, Result};
use crate::Rational;

/// `cx·x + cp·p + c0` with `t`-dependent coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearImage {
    pub cx: ScalarExpr,
    pub cp: ScalarExpr,
    pub c0: ScalarExpr,
}

impl LinearImage {
    pub fn new(cx: ScalarExpr, cp: ScalarExpr, c0: ScalarExpr) -> Self {
        LinearImage { cx, cp, c0 }
    }

    pub fn x() -> Self {
        LinearImage::new(ScalarExpr::one(), ScalarExpr::zero(), ScalarExpr::zero())
    }

    pub fn p() -> Self {
        LinearImage::new(ScalarExpr::zero(), ScalarExpr::one(), ScalarExpr::zero())
    }

    pub fn to_expr(&self) -> ScalarExpr {
        &self.cx * ScalarExpr::x() + &self.cp * ScalarExpr::p() + &self.c0
    }
}

/// Image of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TMap {
    Identity,
    /// `t + λ`
    Shift(Rational),
    /// `s·t`, `s > 0`
    Scale(Rational),
    /// `t / (1 + λt)`
    Mobius(Rational),
    /// `1/t`
    Inversion,
}

impl TMap {
    /// `(a1, a0, e1, e0)` with `T = (a1 t + a0) / (e1 t + e0)`.
    pub fn coefficients(&self) -> [Rational; 4] {
        let (z, o) = (Rational::zero(), Rational::one());
        match self {
            TMap::Identity => [o.clone(), z.clone(), z, o],
            TMap::Shift(l) => [o.clone(), l.clone(), z, o],
            TMap::Scale(s) => [s.clone(), z.clone(), z, o],
            TMap::Mobius(l) => [o.clone(), z, l.clone(), o],
            TMap::Inversion => [z.clone(), o.clone(), o, z],
        }
    }

    pub fn apply_rational(&self, t: &Rational) -> Option<Rational> {
        let [a1, a0, e1, e0] = self.coefficients();
        let d = &e1 * t + &e0;
        (!d.is_zero()).then(|| (&a1 * t + &a0) / d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Substitution {
    pub x: LinearImage,
    pub p: LinearImage,
    pub t: TMap,
    /// A point of the working window; square-root images are put on the branch that is real
    /// and positive there.
    pub reference_t: Rational,
}

impl Default for Substitution {
    fn default() -> Self {
        Substitution::identity()
    }
}

impl Substitution {
    pub fn identity() -> Self {
        Substitution {
            x: LinearImage::x(),
            p: LinearImage::p(),
            t: TMap::Identity,
            reference_t: Rational::one(),
        }
    }

    /// `x ↔ p`, `t ↦ 1/t`.
    pub fn exchange() -> Self {
        Substitution {
            x: LinearImage::p(),
            p: LinearImage::x(),
            t: TMap::Inversion,
            reference_t: Rational::one(),
        }
    }

    pub fn with_x(mut self, x: LinearImage) -> Self {
        self.x = x;
        self
    }

    pub fn with_p(mut self, p: LinearImage) -> Self {
        self.p = p;
        self
    }

    pub fn with_t(mut self, t: TMap) -> Self {
        self.t = t;
        self
    }

    pub fn with_reference(mut self, t: Rational) -> Self {
        self.reference_t = t;
        self
    }

    /// `T` as an expression in `t`.
    pub fn t_image(&self) -> Result<ScalarExpr> {
        let [a1, a0, e1, e0] = self.t.coefficients();
        let num = ScalarExpr::t().scale(&a1) + ScalarExpr::constant(a0);
        Ok(num * ScalarExpr::linear_pow(&e1, &e0, &-Rational::one())?)
    }

    pub fn apply(&self, e: &ScalarExpr) -> Result<ScalarExpr> {
        if let TMap::Scale(s) = &self.t {
            if !s.is_positive() {
                return Err(Error::SubstitutionOutOfFamily(format!(
                    "scale factor {s} must be positive"
                )));
            }
        }
        let xs = Powers::new(self.x.to_expr());
        let ps = Powers::new(self.p.to_expr());
        let ts = Powers::new(self.t_image()?);
        let (mut xs, mut ps, mut ts) = (xs, ps, ts);
        let mut out = ScalarExpr::zero();
        for (sig, rf) in e.terms() {
            let mut num = ScalarExpr::zero();
            for (m, c) in rf.num().terms() {
                let mono = xs.get(m.x).clone() * ps.get(m.p) * ts.get(m.t);
                num = num + mono.scale(c);
            }
            let mut factor = self.sig_image(sig)?;
            for (b, n) in rf.den() {
                factor = factor * self.shifted_power(b, -(*n as i64))?;
            }
            out = out + num * factor;
        }
        Ok(out)
    }

    /// `(T + b)^n` for integer `n`.
    fn shifted_power(&self, b: &Rational, n: i64) -> Result<ScalarExpr> {
        let [a1, a0, e1, e0] = self.t.coefficients();
        let n1 = &a1 + b * &e1;
        let n0 = &a0 + b * &e0;
        if n1.is_zero() && n0.is_zero() {
            return Err(Error::SubstitutionOutOfFamily(format!(
                "t + {b} maps to zero"
            )));
        }
        let k = Rational::from_integer(n.into());
        Ok(ScalarExpr::linear_pow(&n1, &n0, &k)? * ScalarExpr::linear_pow(&e1, &e0, &-k)?)
    }

    fn sig_image(&self, sig: &Sig) -> Result<ScalarExpr> {
        let base = Sig {
            roots: Default::default(),
            ..sig.clone()
        };
        let mut out = ScalarExpr::from_term(
            base,
            RatFunc::from_poly(super::Poly::constant(Rational::one())),
        );
        for r in &sig.roots {
            out = out * self.root_image(r)?;
        }
        Ok(out)
    }

    fn root_image(&self, r: &Root) -> Result<ScalarExpr> {
        let [a1, a0, e1, e0] = self.t.coefficients();
        let sign = match r.orient {
            Orient::Plus => Rational::one(),
            Orient::Minus => -Rational::one(),
        };
        let mut n1 = &sign * &a1 + &r.b * &e1;
        let mut n0 = &sign * &a0 + &r.b * &e0;
        let (mut d1, mut d0) = (e1, e0);
        let tr = &self.reference_t;
        let nv = &n1 * tr + &n0;
        let dv = &d1 * tr + &d0;
        if dv.is_zero() || !(&nv * &dv).is_positive() {
            return Err(Error::SubstitutionOutOfFamily(format!(
                "image of {r} is not positive at t = {tr}"
            )));
        }
        if nv.is_negative() {
            n1 = -n1;
            n0 = -n0;
            d1 = -d1;
            d0 = -d0;
        }
        let half = Rational::new(1.into(), 2.into());
        Ok(ScalarExpr::linear_pow(&n1, &n0, &half)? * ScalarExpr::linear_pow(&d1, &d0, &-half)?)
    }

    /// Substitute into a single variable only, leaving the others untouched.
    pub fn single(var: Var, image: LinearImage) -> Self {
        let s = Substitution::identity();
        match var {
            Var::X => s.with_x(image),
            Var::P => s.with_p(image),
            Var::T => s,
        }
    }
}

struct Powers {
    base: ScalarExpr,
    cache: Vec<ScalarExpr>,
}

impl Powers {
    fn new(base: ScalarExpr) -> Self {
        Powers {
            base,
            cache: vec![ScalarExpr::one()],
        }
    }

    fn get(&mut self, n: u32) -> &ScalarExpr {
        while self.cache.len() <= n as usize {
            let next = self.cache.last().unwrap() * &self.base;
            self.cache.push(next);
        }
        &self.cache[n as usize]
    }
}

impl ScalarExpr {
    /// Exact specialization at `t = t0`; square roots of rational values are kept as radicals.
    pub fn at_t(&self, t0: &Rational) -> Result<ScalarExpr> {
        let mut out = ScalarExpr::zero();
        for (sig, rf) in self.terms() {
            let mut num = super::Poly::zero();
            for (m, c) in rf.num().terms() {
                let v = c * num_traits::pow(t0.clone(), m.t as usize);
                num.add_term(super::Monomial::new(m.x, m.p, 0), v);
            }
            let mut val = ScalarExpr::from_poly(num);
            for (b, n) in rf.den() {
                let base = t0 + b;
                if base.is_zero() {
                    return Err(Error::SingularEvaluation(format!(
                        "t + {b} = 0 at t = {t0}"
                    )));
                }
                val = val.scale(&(Rational::one() / num_traits::pow(base, *n as usize)));
            }
            for r in &sig.roots {
                let v = r.radicand_at(t0);
                if v.is_negative() {
                    return Err(Error::NegativeBaseFractionalPower(format!(
                        "{r} at t = {t0}"
                    )));
                }
                val = val * ScalarExpr::rational_pow(&v, &Rational::new(1.into(), 2.into()))?;
            }
            let base = Sig {
                roots: Default::default(),
                ..sig.clone()
            };
            val = val
                * ScalarExpr::from_term(
                    base,
                    RatFunc::from_poly(super::Poly::constant(Rational::one())),
                );
            out = out + val;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn s(src: &str) -> ScalarExpr {
        src.parse().unwrap()
    }

    #[test]
    fn inversion_is_an_involution_on_laurent_terms() {
        let e = s("t^-1");
        let once = Substitution::exchange().apply(&e).unwrap();
        assert_eq!(once, ScalarExpr::t());
        let e = s("x*t^1/2 + p^2*(t+2)^-1");
        let twice = Substitution::exchange()
            .apply(&Substitution::exchange().apply(&e).unwrap())
            .unwrap();
        assert_eq!(twice, e);
    }

    #[test]
    fn hyperbolic_image_of_x() {
        let sub = Substitution::identity().with_x(LinearImage::new(
            ScalarExpr::frac(5, 4),
            ScalarExpr::t().scale(&rat(3, 4)),
            ScalarExpr::zero(),
        ));
        assert_eq!(sub.apply(&ScalarExpr::x()).unwrap(), s("5/4*x + 3/4*t*p"));
    }

    #[test]
    fn mobius_refactors_roots() {
        // (t+1)^{1/2} under t -> t/(1+2t): ((3t+1)/(2t+1))^{1/2}
        let sub = Substitution::identity().with_t(TMap::Mobius(rat(2, 1)));
        let got = sub.apply(&s("(t+1)^1/2")).unwrap();
        let want = s("3^1/2*(t+1/3)^1/2*2^1/2*(t+1/2)^-1/2*1/2");
        assert_eq!(got, want);
    }

    #[test]
    fn multiplicative() {
        let sub = Substitution::identity()
            .with_t(TMap::Shift(rat(1, 3)))
            .with_p(LinearImage::new(
                s("t*(t+1/3)^-1"),
                ScalarExpr::zero(),
                ScalarExpr::zero(),
            ));
        let a = s("p*t^1/2 + x");
        let b = s("(t+2)^-1*p^2 - t^1/2");
        let lhs = sub.apply(&(&a * &b)).unwrap();
        let rhs = sub.apply(&a).unwrap() * sub.apply(&b).unwrap();
        assert_eq!(lhs, rhs);
    }
}
