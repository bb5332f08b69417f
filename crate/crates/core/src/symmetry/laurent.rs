//! Laurent polynomials in a single parameter `g`, used for structure constants that depend on a
//! contraction parameter.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::Rational;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Laurent {
    coeffs: BTreeMap<i32, Rational>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn constant(c: Rational) -> Self {
        Laurent::monomial(c, 0)
    }

    pub fn int(n: i64) -> Self {
        Laurent::constant(Rational::from_integer(n.into()))
    }

    /// `c · g^k`
    pub fn monomial(c: Rational, k: i32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        Laurent { coeffs }
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, Rational> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => self.coeffs.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn min_power(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (k, c) in &o.coeffs {
            let v = out.coeffs.entry(*k).or_insert_with(Rational::zero);
            *v += c;
            if v.is_zero() {
                out.coeffs.remove(k);
            }
        }
        out
    }

    pub fn neg(&self) -> Laurent {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, k: &Rational) -> Laurent {
        if k.is_zero() {
            return Laurent::zero();
        }
        Laurent {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (a, c) in &self.coeffs {
            for (b, d) in &o.coeffs {
                out = out.add(&Laurent::monomial(c * d, a + b));
            }
        }
        out
    }

    /// Multiply by `g^k`.
    pub fn shift(&self, k: i32) -> Laurent {
        Laurent {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, g: &Rational) -> Rational {
        let mut out = Rational::zero();
        for (e, c) in &self.coeffs {
            let pw = if *e >= 0 {
                num_traits::pow(g.clone(), *e as usize)
            } else {
                num_traits::pow(Rational::one() / g, e.unsigned_abs() as usize)
            };
            out += c * pw;
        }
        out
    }

    /// Value at `g = 0`, or `None` when a negative power is present.
    pub fn limit_at_zero(&self) -> Option<Rational> {
        if self.min_power().is_some_and(|k| k < 0) {
            return None;
        }
        Some(self.coeffs.get(&0).cloned().unwrap_or_default())
    }
}

impl From<Rational> for Laurent {
    fn from(c: Rational) -> Self {
        Laurent::constant(c)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.coeffs.iter().rev().enumerate() {
            let neg = *c < Rational::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let power = match *e {
                0 => String::new(),
                1 => "g".to_string(),
                k => format!("g^{k}"),
            };
            if power.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{power}")?;
            } else {
                write!(f, "{a}*{power}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn arithmetic() {
        let a = Laurent::monomial(rat(2, 1), -1).add(&Laurent::int(1));
        let b = Laurent::monomial(rat(1, 1), 1);
        assert_eq!(a.mul(&b), Laurent::int(2).add(&b));
        assert_eq!(a.eval(&rat(2, 1)), rat(2, 1));
        assert_eq!(a.limit_at_zero(), None);
        assert_eq!(b.limit_at_zero(), Some(rat(0, 1)));
        assert_eq!(a.to_string(), "1 + 2*g^-1");
    }
}
