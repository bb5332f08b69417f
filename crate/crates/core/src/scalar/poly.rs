//! Sparse polynomials in `x`, `p`, `t` with exact rational coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Exponent triple of a monomial `x^x p^p t^t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: u32,
    pub p: u32,
    pub t: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, p: 0, t: 0 };

    pub fn new(x: u32, p: u32, t: u32) -> Self {
        Monomial { x, p, t }
    }

    fn mul(self, other: Monomial) -> Monomial {
        Monomial::new(self.x + other.x, self.p + other.p, self.t + other.t)
    }

    /// The `(x, p)` part, used to slice a polynomial into univariate pieces in `t`.
    pub fn xp(self) -> (u32, u32) {
        (self.x, self.p)
    }
}

/// The independent variables of the coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Var {
    X,
    P,
    T,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Poly::monomial(Monomial::ONE, c)
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    /// `t + b`
    pub fn linear_t(b: &Rational) -> Self {
        let mut p = Poly::monomial(Monomial::new(0, 0, 1), Rational::one());
        p.add_term(Monomial::ONE, b.clone());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(*mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::constant(Rational::one());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Multiply by `t + b`.
    pub fn mul_linear(&self, b: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(Monomial::new(m.x, m.p, m.t + 1), c.clone());
            out.add_term(*m, c * b);
        }
        out
    }

    /// Exact division by `t + b`; `None` when `t = -b` is not a root for every `(x, p)` slice.
    pub fn div_linear(&self, b: &Rational) -> Option<Poly> {
        let mut out = Poly::zero();
        for ((x, p), coeffs) in self.t_slices() {
            // coeffs[k] is the coefficient of t^k
            let n = coeffs.len();
            if n == 0 {
                continue;
            }
            let mut q = vec![Rational::zero(); n.saturating_sub(1)];
            let mut carry = Rational::zero();
            for k in (1..n).rev() {
                carry = &coeffs[k] - b * &carry;
                q[k - 1] = carry.clone();
            }
            let rem = &coeffs[0] - b * &carry;
            if n == 1 {
                if !coeffs[0].is_zero() {
                    return None;
                }
                continue;
            }
            if !rem.is_zero() {
                return None;
            }
            for (k, c) in q.into_iter().enumerate() {
                out.add_term(Monomial::new(x, p, k as u32), c);
            }
        }
        Some(out)
    }

    /// Group coefficients by `(x, p)`, giving a dense coefficient vector in `t` for each slice.
    pub fn t_slices(&self) -> BTreeMap<(u32, u32), Vec<Rational>> {
        let mut out: BTreeMap<(u32, u32), Vec<Rational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = out.entry(m.xp()).or_default();
            if v.len() <= m.t as usize {
                v.resize(m.t as usize + 1, Rational::zero());
            }
            v[m.t as usize] = c.clone();
        }
        out
    }

    pub fn from_t_slices(slices: &BTreeMap<(u32, u32), Vec<Rational>>) -> Poly {
        let mut out = Poly::zero();
        for (&(x, p), v) in slices {
            for (k, c) in v.iter().enumerate() {
                out.add_term(Monomial::new(x, p, k as u32), c.clone());
            }
        }
        out
    }

    pub fn diff(&self, var: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, dm) = match var {
                Var::X if m.x > 0 => (m.x, Monomial::new(m.x - 1, m.p, m.t)),
                Var::P if m.p > 0 => (m.p, Monomial::new(m.x, m.p - 1, m.t)),
                Var::T if m.t > 0 => (m.t, Monomial::new(m.x, m.p, m.t - 1)),
                _ => continue,
            };
            out.add_term(dm, c * Rational::from_integer(e.into()));
        }
        out
    }

    pub fn depends_on(&self, var: Var) -> bool {
        self.terms.keys().any(|m| match var {
            Var::X => m.x > 0,
            Var::P => m.p > 0,
            Var::T => m.t > 0,
        })
    }

    pub fn max_xp_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.x + m.p).max().unwrap_or(0)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (*m == Monomial::ONE).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Rational roots of a polynomial in `t` alone (with multiplicity), if it splits
    /// completely into rational linear factors. Returns the leading coefficient and the roots.
    pub fn split_linear_t(&self) -> Option<(Rational, Vec<Rational>)> {
        if self.depends_on(Var::X) || self.depends_on(Var::P) || self.is_zero() {
            return None;
        }
        let slices = self.t_slices();
        let mut coeffs = slices.get(&(0, 0)).cloned()?;
        let mut roots = Vec::new();
        loop {
            while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
                coeffs.pop();
            }
            if coeffs.len() == 1 {
                return Some((coeffs[0].clone(), roots));
            }
            // strip t factors first
            if coeffs[0].is_zero() {
                coeffs.remove(0);
                roots.push(Rational::zero());
                continue;
            }
            let root = rational_root(&coeffs)?;
            let poly = Poly::from_t_slices(&BTreeMap::from([((0, 0), coeffs.clone())]));
            let q = poly.div_linear(&(-root.clone()))?;
            coeffs = q
                .t_slices()
                .remove(&(0, 0))
                .unwrap_or_else(|| vec![Rational::zero()]);
            roots.push(root);
        }
    }
}

/// One rational root of a dense univariate polynomial with nonzero constant term.
fn rational_root(coeffs: &[Rational]) -> Option<Rational> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    // clear denominators
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let a0 = ints.first()?.abs();
    let an = ints.last()?.abs();
    let divs = |n: &BigInt| -> Option<Vec<BigInt>> {
        // trial division is enough for the small constants occurring here
        if n.bits() > 48 {
            return None;
        }
        let n: u64 = n.try_into().ok()?;
        let mut out = Vec::new();
        let mut d = 1u64;
        while d * d <= n {
            if n.is_multiple_of(d) {
                out.push(BigInt::from(d));
                if d * d != n {
                    out.push(BigInt::from(n / d));
                }
            }
            d += 1;
        }
        Some(out)
    };
    let num_divs = divs(&a0)?;
    let den_divs = divs(&an)?;
    for n in &num_divs {
        for d in &den_divs {
            for sign in [1i32, -1] {
                let cand = Rational::new(n * BigInt::from(sign), d.clone());
                let mut acc = Rational::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * &cand + c;
                }
                if acc.is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}
