//! Reduced rational functions `N(x, p, t) / ∏ (t + b)^n` with rational shifts `b`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{Poly, Var};
use crate::Rational;

/// `num / ∏_b (t + b)^{den[b]}`, kept reduced: no shift in `den` divides `num`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatFunc {
    num: Poly,
    den: BTreeMap<Rational, u32>,
}

/// Coordinates of a rational function in the basis `{x^i p^j t^k} ∪ {x^i p^j (t+b)^-k}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TAtom {
    Pow(u32),
    Pole(Rational, u32),
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc::default()
    }

    pub fn from_poly(num: Poly) -> Self {
        RatFunc {
            num,
            den: BTreeMap::new(),
        }
    }

    pub fn new(num: Poly, den: BTreeMap<Rational, u32>) -> Self {
        let mut r = RatFunc { num, den };
        r.den.retain(|_, n| *n > 0);
        r.reduce();
        r
    }

    /// `(t + b)^n` for any integer `n`.
    pub fn linear_power(b: &Rational, n: i64) -> Self {
        if n >= 0 {
            RatFunc::from_poly(Poly::linear_t(b).pow(n as u32))
        } else {
            RatFunc::new(
                Poly::constant(Rational::one()),
                BTreeMap::from([(b.clone(), (-n) as u32)]),
            )
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &BTreeMap<Rational, u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let shifts: Vec<Rational> = self.den.keys().cloned().collect();
        for b in shifts {
            while let Some(n) = self.den.get(&b).copied() {
                match self.num.div_linear(&b) {
                    Some(q) => {
                        self.num = q;
                        if n == 1 {
                            self.den.remove(&b);
                        } else {
                            self.den.insert(b.clone(), n - 1);
                        }
                    }
                    None => break,
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut common = self.den.clone();
        for (b, n) in &other.den {
            let e = common.entry(b.clone()).or_insert(0);
            *e = (*e).max(*n);
        }
        let lift = |r: &RatFunc| {
            let mut num = r.num.clone();
            for (b, n) in &common {
                let have = r.den.get(b).copied().unwrap_or(0);
                for _ in have..*n {
                    num = num.mul_linear(b);
                }
            }
            num
        };
        let num = lift(self).add(&lift(other));
        RatFunc::new(num, common)
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        let mut den = self.den.clone();
        for (b, n) in &other.den {
            *den.entry(b.clone()).or_insert(0) += n;
        }
        RatFunc::new(self.num.mul(&other.num), den)
    }

    pub fn diff(&self, var: Var) -> RatFunc {
        match var {
            Var::X | Var::P => RatFunc::new(self.num.diff(var), self.den.clone()),
            Var::T => {
                let mut out = RatFunc::new(self.num.diff(Var::T), self.den.clone());
                for (b, n) in &self.den {
                    let mut den = self.den.clone();
                    *den.get_mut(b).unwrap() += 1;
                    let k = Rational::from_integer(BigInt::from(*n));
                    out = out.add(&RatFunc::new(self.num.scale(&-k), den));
                }
                out
            }
        }
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match var {
            Var::T => !self.den.is_empty() || self.num.depends_on(Var::T),
            _ => self.num.depends_on(var),
        }
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_empty() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Inverse when the numerator is `t`-only and splits into rational linear factors.
    pub fn inverse(&self) -> Option<RatFunc> {
        let (lead, roots) = self.num.split_linear_t()?;
        let mut num = Poly::constant(Rational::one() / lead);
        for (b, n) in &self.den {
            num = num.mul(&Poly::linear_t(b).pow(*n));
        }
        let mut den = BTreeMap::new();
        for r in roots {
            *den.entry(-r).or_insert(0) += 1;
        }
        Some(RatFunc::new(num, den))
    }

    /// Unique coordinates in the polynomial-plus-principal-parts basis.
    pub fn atoms(&self) -> BTreeMap<(u32, u32, TAtom), Rational> {
        let mut out = BTreeMap::new();
        let den_poly = self.den.iter().fold(vec![Rational::one()], |acc, (b, n)| {
            let mut acc = acc;
            for _ in 0..*n {
                acc = mul_linear_dense(&acc, b);
            }
            acc
        });
        for ((x, p), coeffs) in self.num.t_slices() {
            let (quot, _) = dense_divrem(&coeffs, &den_poly);
            for (k, c) in quot.iter().enumerate() {
                if !c.is_zero() {
                    out.insert((x, p, TAtom::Pow(k as u32)), c.clone());
                }
            }
            for (b, n) in &self.den {
                for (k, c) in principal_part(&coeffs, &self.den, b, *n) {
                    if !c.is_zero() {
                        out.insert((x, p, TAtom::Pole(b.clone(), k)), c);
                    }
                }
            }
        }
        out
    }
}

fn mul_linear_dense(a: &[Rational], b: &Rational) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + 1];
    for (k, c) in a.iter().enumerate() {
        out[k + 1] += c;
        out[k] += c * b;
    }
    out
}

fn dense_divrem(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    if rem.len() <= dn {
        return (vec![], rem);
    }
    let lead = den[dn].clone();
    let mut quot = vec![Rational::zero(); rem.len() - dn];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + dn] / &lead;
        if !c.is_zero() {
            for (j, d) in den.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
        }
        quot[k] = c;
    }
    rem.truncate(dn);
    (quot, rem)
}

/// Coefficients `c_k` of `(t + b)^{-k}`, `k = 1..=n`, in the partial fraction expansion of
/// `num(t) / ∏ (t + s)^{den[s]}`.
fn principal_part(
    num: &[Rational],
    den: &BTreeMap<Rational, u32>,
    b: &Rational,
    n: u32,
) -> Vec<(u32, Rational)> {
    let order = n as usize;
    // Taylor coefficients of num around t = -b, i.e. num(u - b) as a polynomial in u
    let mut shifted = vec![Rational::zero(); order];
    let mut binom_row: Vec<Rational> = Vec::new();
    for (k, c) in num.iter().enumerate() {
        // (u - b)^k = Σ_j C(k, j) u^j (-b)^{k-j}
        binom_row = next_binomial_row(&binom_row);
        for (j, bin) in binom_row.iter().enumerate().take(order) {
            let pw = pow_rational(&-b.clone(), (k - j) as u32);
            shifted[j] += c * bin * pw;
        }
    }
    // multiply by the series of each remaining factor (u + (s - b))^{-m}
    let mut series = shifted;
    for (s, m) in den {
        if s == b {
            continue;
        }
        let d = s - b;
        let inv_d = Rational::one() / &d;
        // (u + d)^{-m} = d^{-m} Σ_j C(-m, j) (u/d)^j
        let mut fac = vec![Rational::zero(); order];
        let mut coef = pow_rational(&inv_d, *m);
        for (j, f) in fac.iter_mut().enumerate() {
            *f = coef.clone();
            // C(-m, j+1) / C(-m, j) = (-m - j) / (j + 1)
            let ratio = Rational::new(
                BigInt::from(-(*m as i64) - j as i64),
                BigInt::from(j as i64 + 1),
            );
            coef = coef * ratio * &inv_d;
        }
        let mut prod = vec![Rational::zero(); order];
        for i in 0..order {
            for j in 0..order - i {
                prod[i + j] += &series[i] * &fac[j];
            }
        }
        series = prod;
    }
    // u^j / u^n = u^{j - n}: pole order n - j
    series
        .into_iter()
        .enumerate()
        .map(|(j, c)| (n - j as u32, c))
        .collect()
}

fn next_binomial_row(prev: &[Rational]) -> Vec<Rational> {
    if prev.is_empty() {
        return vec![Rational::one()];
    }
    let mut row = vec![Rational::one(); prev.len() + 1];
    for k in 1..prev.len() {
        row[k] = &prev[k - 1] + &prev[k];
    }
    row
}

pub(crate) fn pow_rational(q: &Rational, n: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..n {
        out *= q;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Monomial;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn reduction_cancels_common_linear_factors() {
        // (t^2 - 1) / (t + 1) = t - 1
        let num = Poly::monomial(Monomial::new(0, 0, 2), q(1)).add(&Poly::constant(q(-1)));
        let r = RatFunc::new(num, BTreeMap::from([(q(1), 1)]));
        assert!(r.den().is_empty());
        assert_eq!(r.num(), &Poly::linear_t(&q(-1)));
    }

    #[test]
    fn partial_fractions_of_simple_quotient() {
        // 1 / (t (t + 1)) = 1/t - 1/(t+1)
        let r = RatFunc::linear_power(&q(0), -1).mul(&RatFunc::linear_power(&q(1), -1));
        let atoms = r.atoms();
        assert_eq!(atoms.get(&(0, 0, TAtom::Pole(q(0), 1))), Some(&q(1)));
        assert_eq!(atoms.get(&(0, 0, TAtom::Pole(q(1), 1))), Some(&q(-1)));
        assert_eq!(atoms.len(), 2);
    }

    #[test]
    fn partial_fractions_with_polynomial_part() {
        // t^3 / (t + 1)^2 = t - 2 + 3/(t+1) - 1/(t+1)^2
        let r = RatFunc::new(
            Poly::monomial(Monomial::new(0, 0, 3), q(1)),
            BTreeMap::from([(q(1), 2)]),
        );
        let atoms = r.atoms();
        assert_eq!(atoms.get(&(0, 0, TAtom::Pow(1))), Some(&q(1)));
        assert_eq!(atoms.get(&(0, 0, TAtom::Pow(0))), Some(&q(-2)));
        assert_eq!(atoms.get(&(0, 0, TAtom::Pole(q(1), 1))), Some(&q(3)));
        assert_eq!(atoms.get(&(0, 0, TAtom::Pole(q(1), 2))), Some(&q(-1)));
    }
}
