//! Text syntax for expressions and operators.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := power (('*'|'/') power)*
//! power   := atom ['^' exponent]
//! exponent:= ['-'] int ['/' int]  |  '(' ['-'] int ['/' int] ')'
//! atom    := int | x | p | t | pi | Dt | Dx | Dp | exp '(' expr ')' | '(' expr ')'
//! ```
//!
//! Exponents are read as a single rational, so `t^1/2` is `√t` and `x^2/3` is rejected.
//! Fractional powers apply to constants, to `pi` and to linear factors `(c1*t + c0)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{poly::Var, ScalarExpr};
use crate::error::{Error, Result};
use crate::gaussian::GaussianExpr;
use crate::operator::DiffOperator;
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut pos = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
            pos += c.len_utf8();
            continue;
        }
        let start = pos;
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                s.push(bytes[i]);
                i += 1;
                pos += 1;
            }
            out.push((start, Tok::Int(s.parse().unwrap())));
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                s.push(bytes[i]);
                i += 1;
                pos += 1;
            }
            out.push((start, Tok::Ident(s)));
        } else if "+-*/^()".contains(c) {
            out.push((start, Tok::Sym(c)));
            i += 1;
            pos += 1;
        } else {
            return Err(Error::Parse {
                pos,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

/// Operations the parser needs from a target algebra.
trait Target: Sized + Clone {
    fn number(n: Rational) -> Self;
    fn scalar(s: ScalarExpr) -> Self;
    fn derivative(v: Var) -> Option<Self>;
    fn exp(arg: Self) -> Option<Self>;
    fn add(self, o: Self) -> Self;
    fn neg(self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn div(self, o: Self) -> Result<Self>;
    fn pow(self, e: &Rational) -> Result<Self>;
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    i: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.0).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr<T: Target>(&mut self) -> Result<T> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut acc: T = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.eat('+') {
                acc = acc.add(self.term()?);
            } else if self.eat('-') {
                acc = acc.add(self.term::<T>()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<T: Target>(&mut self) -> Result<T> {
        let mut acc: T = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(self.power()?);
            } else if self.eat('/') {
                let pos = self.pos();
                let d = self.power()?;
                acc = acc.div(d).map_err(|e| Error::Parse {
                    pos,
                    msg: e.to_string(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power<T: Target>(&mut self) -> Result<T> {
        let base: T = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let e = self.exponent()?;
        base.pow(&e).map_err(|err| Error::Parse {
            pos,
            msg: err.to_string(),
        })
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.i += 1;
                Ok(n)
            }
            _ => self.err("expected an integer"),
        }
    }

    fn exponent(&mut self) -> Result<Rational> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let n = self.int()?;
        let d = if self.eat('/') {
            self.int()?
        } else {
            BigInt::one()
        };
        if d.is_zero() {
            return self.err("zero denominator in exponent");
        }
        if paren {
            self.expect(')')?;
        }
        let q = Rational::new(n, d);
        Ok(if neg { -q } else { q })
    }

    fn atom<T: Target>(&mut self) -> Result<T> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.i += 1;
                Ok(T::number(Rational::from_integer(n)))
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                match name.as_str() {
                    "x" => Ok(T::scalar(ScalarExpr::x())),
                    "p" => Ok(T::scalar(ScalarExpr::p())),
                    "t" => Ok(T::scalar(ScalarExpr::t())),
                    "pi" => Ok(T::scalar(ScalarExpr::pi_pow_half(2))),
                    "Dt" | "Dx" | "Dp" => {
                        let v = match name.as_str() {
                            "Dt" => Var::T,
                            "Dx" => Var::X,
                            _ => Var::P,
                        };
                        match T::derivative(v) {
                            Some(d) => Ok(d),
                            None => {
                                self.i -= 1;
                                self.err("derivative marker outside an operator")
                            }
                        }
                    }
                    "exp" => {
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        match T::exp(arg) {
                            Some(v) => Ok(v),
                            None => self.err("exp(...) not allowed here"),
                        }
                    }
                    other => {
                        self.i -= 1;
                        self.err(format!("unknown identifier {other:?}"))
                    }
                }
            }
            _ => self.err("unexpected token"),
        }
    }
}

fn run<T: Target>(src: &str) -> Result<T> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks: &toks,
        i: 0,
        len: src.len(),
    };
    if toks.is_empty() {
        return p.err("empty expression");
    }
    let v = p.expr()?;
    if p.i != toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

impl ScalarExpr {
    /// `self^e` for integer `e`, or half-integer `e` when `self` is a positive constant, a power
    /// of π or a linear polynomial in `t`.
    pub fn pow_rational(&self, e: &Rational) -> Result<ScalarExpr> {
        if e.is_integer() {
            let n: i64 = e
                .to_integer()
                .try_into()
                .map_err(|_| Error::InvalidParameter(format!("exponent {e}")))?;
            return self.pow_int(n);
        }
        if let Some(c) = self.constant_value() {
            return ScalarExpr::rational_pow(&c, e);
        }
        let fail = || Error::InvalidParameter(format!("fractional power of {self}"));
        if self.terms.len() == 1 {
            let (sig, rf) = self.terms.iter().next().unwrap();
            if sig.roots.is_empty() && sig.radicand.is_one() && rf.den().is_empty() {
                if let Some(c) = rf.constant_value() {
                    let k = Rational::from_integer(sig.pi_half.into()) * e;
                    if !k.is_integer() {
                        return Err(fail());
                    }
                    let k: i32 = k.to_integer().try_into().map_err(|_| fail())?;
                    return Ok(ScalarExpr::rational_pow(&c, e)? * ScalarExpr::pi_pow_half(k));
                }
            }
        }
        if self.is_t_only() && self.terms.len() == 1 {
            let (sig, rf) = self.terms.iter().next().unwrap();
            if sig.is_one() && rf.den().is_empty() {
                let slices = rf.num().t_slices();
                if let Some(c) = slices.get(&(0, 0)) {
                    if c.len() == 2 {
                        return ScalarExpr::linear_pow(&c[1], &c[0], e);
                    }
                }
            }
        }
        Err(fail())
    }
}

impl Target for GaussianExpr {
    fn number(n: Rational) -> Self {
        GaussianExpr::scalar(ScalarExpr::constant(n))
    }
    fn scalar(s: ScalarExpr) -> Self {
        GaussianExpr::scalar(s)
    }
    fn derivative(_: Var) -> Option<Self> {
        None
    }
    fn exp(arg: Self) -> Option<Self> {
        let s = arg.as_scalar()?;
        GaussianExpr::exp(s).ok()
    }
    fn add(self, o: Self) -> Self {
        &self + &o
    }
    fn neg(self) -> Self {
        -&self
    }
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
    fn div(self, o: Self) -> Result<Self> {
        Ok(&self * &o.try_inverse()?)
    }
    fn pow(self, e: &Rational) -> Result<Self> {
        if let Some(s) = self.as_scalar() {
            return Ok(GaussianExpr::scalar(s.pow_rational(e)?));
        }
        if !e.is_integer() {
            return Err(Error::InvalidParameter(
                "fractional power of an exponential term".into(),
            ));
        }
        let n: i64 = e
            .to_integer()
            .try_into()
            .map_err(|_| Error::InvalidParameter(format!("exponent {e}")))?;
        let base = if n < 0 { self.try_inverse()? } else { self };
        let mut out = GaussianExpr::one();
        for _ in 0..n.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }
}

impl Target for DiffOperator {
    fn number(n: Rational) -> Self {
        DiffOperator::scalar(ScalarExpr::constant(n))
    }
    fn scalar(s: ScalarExpr) -> Self {
        DiffOperator::scalar(s)
    }
    fn derivative(v: Var) -> Option<Self> {
        Some(DiffOperator::partial(v))
    }
    fn exp(_: Self) -> Option<Self> {
        None
    }
    fn add(self, o: Self) -> Self {
        DiffOperator::add(&self, &o)
    }
    fn neg(self) -> Self {
        DiffOperator::neg(&self)
    }
    fn mul(self, o: Self) -> Self {
        self.compose(&o)
    }
    fn div(self, o: Self) -> Result<Self> {
        let s = o
            .as_scalar()
            .ok_or_else(|| Error::NotInvertible("division by a differential operator".into()))?;
        Ok(self.compose(&DiffOperator::scalar(s.try_inverse()?)))
    }
    fn pow(self, e: &Rational) -> Result<Self> {
        if let Some(s) = self.as_scalar() {
            return Ok(DiffOperator::scalar(s.pow_rational(e)?));
        }
        if !e.is_integer() || num_traits::Signed::is_negative(e) {
            return Err(Error::InvalidParameter(format!(
                "operator power {e} must be a nonnegative integer"
            )));
        }
        let n: u32 = e
            .to_integer()
            .try_into()
            .map_err(|_| Error::InvalidParameter(format!("exponent {e}")))?;
        let mut out = DiffOperator::identity();
        for _ in 0..n {
            out = out.compose(&self);
        }
        Ok(out)
    }
}

pub fn parse_gaussian(src: &str) -> Result<GaussianExpr> {
    run(src)
}

pub fn parse_scalar(src: &str) -> Result<ScalarExpr> {
    let g: GaussianExpr = run(src)?;
    g.as_scalar().ok_or_else(|| Error::Parse {
        pos: 0,
        msg: "exponential factor in a scalar expression".into(),
    })
}

pub fn parse_operator(src: &str) -> Result<DiffOperator> {
    run(src)
}
