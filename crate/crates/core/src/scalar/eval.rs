//! Numeric evaluation of exact expressions, in `f64` or in arbitrary precision.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_traits::{ToPrimitive, Zero};

use super::{sig::Orient, ScalarExpr};
use crate::error::{Error, Result};
use crate::Rational;

/// Guard bits added to the working precision of [`BigReal`] evaluations.
pub const GUARD_BITS: usize = 64;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

/// Minimal real-field interface shared by `f64` and [`BigReal`].
pub trait Real: Clone + Sized {
    fn from_rational(q: &Rational, prec: usize) -> Self;
    fn pi(prec: usize) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn to_f64(&self) -> f64;

    fn powi(&self, n: u32, prec: usize) -> Self {
        let mut out = Self::from_rational(&Rational::from_integer(1.into()), prec);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

impl Real for f64 {
    fn from_rational(q: &Rational, _prec: usize) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn pi(_prec: usize) -> Self {
        std::f64::consts::PI
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn powi(&self, n: u32, _prec: usize) -> Self {
        f64::powi(*self, n as i32)
    }
}

/// Arbitrary-precision real carrying its working precision in bits.
#[derive(Clone, Debug)]
pub struct BigReal {
    pub value: BigFloat,
    pub prec: usize,
}

impl BigReal {
    pub fn new(value: BigFloat, prec: usize) -> Self {
        BigReal { value, prec }
    }

    pub fn from_f64(v: f64, prec: usize) -> Self {
        BigReal::new(BigFloat::from_f64(v, prec), prec)
    }

    fn wrap(&self, value: BigFloat) -> Self {
        BigReal::new(value, self.prec)
    }
}

impl std::fmt::Display for BigReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn big_integer(n: &num_bigint::BigInt, prec: usize) -> BigFloat {
    CONSTS.with(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, prec, RM, &mut cc.borrow_mut()))
}

impl Real for BigReal {
    fn from_rational(q: &Rational, prec: usize) -> Self {
        let n = big_integer(q.numer(), prec);
        let d = big_integer(q.denom(), prec);
        BigReal::new(n.div(&d, prec, RM), prec)
    }
    fn pi(prec: usize) -> Self {
        BigReal::new(CONSTS.with(|cc| cc.borrow_mut().pi(prec, RM)), prec)
    }
    fn add(&self, o: &Self) -> Self {
        self.wrap(self.value.add(&o.value, self.prec, RM))
    }
    fn sub(&self, o: &Self) -> Self {
        self.wrap(self.value.sub(&o.value, self.prec, RM))
    }
    fn mul(&self, o: &Self) -> Self {
        self.wrap(self.value.mul(&o.value, self.prec, RM))
    }
    fn div(&self, o: &Self) -> Self {
        self.wrap(self.value.div(&o.value, self.prec, RM))
    }
    fn sqrt(&self) -> Self {
        self.wrap(self.value.sqrt(self.prec, RM))
    }
    fn exp(&self) -> Self {
        self.wrap(CONSTS.with(|cc| self.value.exp(self.prec, RM, &mut cc.borrow_mut())))
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
    fn is_negative(&self) -> bool {
        self.value.is_negative()
    }
    fn to_f64(&self) -> f64 {
        format!("{}", self.value).parse().unwrap_or(f64::NAN)
    }
}

impl ScalarExpr {
    /// Evaluate at `(x, p, t)` with `prec` bits of working precision (ignored for `f64`).
    pub fn eval_with<R: Real>(&self, x: &R, p: &R, t: &R, prec: usize) -> Result<R> {
        let mut total = R::from_rational(&Rational::zero(), prec);
        for (sig, rf) in self.terms() {
            let mut num = R::from_rational(&Rational::zero(), prec);
            for (m, c) in rf.num().terms() {
                let term = R::from_rational(c, prec)
                    .mul(&x.powi(m.x, prec))
                    .mul(&p.powi(m.p, prec))
                    .mul(&t.powi(m.t, prec));
                num = num.add(&term);
            }
            let mut val = num;
            for (b, n) in rf.den() {
                let base = t.add(&R::from_rational(b, prec));
                if base.is_zero() {
                    return Err(Error::SingularEvaluation(format!("t + {b} = 0")));
                }
                val = val.div(&base.powi(*n, prec));
            }
            for root in &sig.roots {
                let b = R::from_rational(&root.b, prec);
                let base = match root.orient {
                    Orient::Plus => t.add(&b),
                    Orient::Minus => b.sub(t),
                };
                if base.is_negative() {
                    return Err(Error::NegativeBaseFractionalPower(root.to_string()));
                }
                val = val.mul(&base.sqrt());
            }
            if !sig.radicand.is_zero() && sig.radicand != 1.into() {
                let r = R::from_rational(&Rational::from_integer(sig.radicand.clone()), prec);
                val = val.mul(&r.sqrt());
            }
            if sig.pi_half != 0 {
                let sq = R::pi(prec).sqrt();
                let k = sig.pi_half.unsigned_abs();
                let f = sq.powi(k, prec);
                val = if sig.pi_half > 0 {
                    val.mul(&f)
                } else {
                    val.div(&f)
                };
            }
            total = total.add(&val);
        }
        Ok(total)
    }

    pub fn eval_f64(&self, x: f64, p: f64, t: f64) -> Result<f64> {
        self.eval_with(&x, &p, &t, 53)
    }

    /// Evaluate at rational coordinates with `precision_bits` plus [`GUARD_BITS`] of working
    /// precision.
    pub fn eval_big(
        &self,
        x: &Rational,
        p: &Rational,
        t: &Rational,
        precision_bits: usize,
    ) -> Result<BigReal> {
        let prec = precision_bits + GUARD_BITS;
        let conv = |q: &Rational| BigReal::from_rational(q, prec);
        self.eval_with(&conv(x), &conv(p), &conv(t), prec)
    }

    pub fn compile(&self) -> CompiledScalar {
        let mut terms = Vec::new();
        for (sig, rf) in self.terms() {
            let mut scale = sig.radicand.to_f64().unwrap_or(f64::NAN).sqrt();
            scale *= std::f64::consts::PI.powf(sig.pi_half as f64 / 2.0);
            let roots = sig
                .roots
                .iter()
                .map(|r| {
                    let b = r.b.to_f64().unwrap_or(f64::NAN);
                    match r.orient {
                        Orient::Plus => (1.0, b),
                        Orient::Minus => (-1.0, b),
                    }
                })
                .collect();
            let monos = rf
                .num()
                .terms()
                .map(|(m, c)| {
                    (
                        c.to_f64().unwrap_or(f64::NAN),
                        m.x as i32,
                        m.p as i32,
                        m.t as i32,
                    )
                })
                .collect();
            let den = rf
                .den()
                .iter()
                .map(|(b, n)| (b.to_f64().unwrap_or(f64::NAN), *n as i32))
                .collect();
            terms.push(CompiledTerm {
                scale,
                roots,
                monos,
                den,
            });
        }
        CompiledScalar { terms }
    }
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    scale: f64,
    /// `(s, b)` for `√(s·t + b)`
    roots: Vec<(f64, f64)>,
    monos: Vec<(f64, i32, i32, i32)>,
    den: Vec<(f64, i32)>,
}

/// `f64` evaluator with all exact constants pre-converted; returns NaN where the exact
/// evaluator would report an error.
#[derive(Clone, Debug)]
pub struct CompiledScalar {
    terms: Vec<CompiledTerm>,
}

impl CompiledScalar {
    pub fn eval(&self, x: f64, p: f64, t: f64) -> f64 {
        let mut total = 0.0;
        for term in &self.terms {
            let mut num = 0.0;
            for &(c, i, j, k) in &term.monos {
                num += c * x.powi(i) * p.powi(j) * t.powi(k);
            }
            let mut v = num * term.scale;
            for &(b, n) in &term.den {
                v /= (t + b).powi(n);
            }
            for &(s, b) in &term.roots {
                v *= (s * t + b).sqrt();
            }
            total += v;
        }
        total
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
    fn simple_values() {
        assert_eq!(s("x^2 + t").eval_f64(2.0, 0.0, 3.0).unwrap(), 7.0);
        assert_eq!(s("t^1/2").eval_f64(0.0, 0.0, 9.0).unwrap(), 3.0);
        assert_eq!(s("(t+1)^-1/2").eval_f64(0.0, 0.0, 3.0).unwrap(), 0.5);
    }

    #[test]
    fn guards() {
        assert!(matches!(
            s("(t-2)^-1").eval_f64(0.0, 0.0, 2.0),
            Err(Error::SingularEvaluation(_))
        ));
        assert!(matches!(
            s("(1-t)^1/2").eval_f64(0.0, 0.0, 2.0),
            Err(Error::NegativeBaseFractionalPower(_))
        ));
    }

    #[test]
    fn big_matches_f64() {
        let e = s("3/2*x^2*p*(t+1)^-1/2*pi^-1/2 + 2^1/2*t^-2");
        let big = e
            .eval_big(&rat(1, 3), &rat(-2, 1), &rat(5, 7), 200)
            .unwrap();
        let f = e.eval_f64(1.0 / 3.0, -2.0, 5.0 / 7.0).unwrap();
        assert!((big.to_f64() - f).abs() < 1e-13 * f.abs());
        let c = e.compile().eval(1.0 / 3.0, -2.0, 5.0 / 7.0);
        assert!((c - f).abs() < 1e-13 * f.abs());
    }
}
