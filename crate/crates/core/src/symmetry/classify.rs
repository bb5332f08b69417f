//! Symmetry classes of `∂_t − ∂_x² − b(t) ∂_y²` according to the coefficient `b(t)`
//! (`y` is stored in the `p` slot).

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::check::{Check, CheckReport};
use crate::error::{Error, Result};
use crate::operator::general_operator;
use crate::scalar::{Orient, Poly, RatFunc, ScalarExpr, Sig, TAtom, Var};
use crate::Rational;

use super::criterion::check_symmetry;
use super::generators::{vf_to_operator, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BClass {
    /// `2bb″ = 3b′²`: mapped to the heat equation by a change of variables.
    StandardReducible,
    /// `b = b₀ t^α` with `α ∉ {0, −2}`.
    PowerLaw,
    Generic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BClassification {
    pub b: ScalarExpr,
    pub class: BClass,
    /// `(b₀, α)` when `b = b₀ t^α`.
    pub power: Option<(String, String)>,
    /// Symmetry algebra of maximal dimension.
    pub maximal: bool,
    pub dimension: usize,
    /// `2bb″ − 3b′²`
    pub obstruction: ScalarExpr,
    /// Multiplier `K(t)` of the standard form, when reducible.
    pub k: Option<ScalarExpr>,
    /// Explicit generators in vector-field form: the Heisenberg part and, for power laws, the
    /// scaling generator. Empty when `∫b` leaves the coefficient family.
    pub generators: Vec<VectorField>,
    pub verification: CheckReport,
}

/// `b₀ t^α` for integer or half-integer `α`.
pub fn power_form(b0: &Rational, alpha: &Rational) -> Result<ScalarExpr> {
    Ok(ScalarExpr::constant(b0.clone()) * ScalarExpr::t_pow(alpha)?)
}

/// Residuals `(4bK′ + Kb′, 2bb″ − 3b′²)`.
pub fn standard_form_conditions(b: &ScalarExpr, k: &ScalarExpr) -> (ScalarExpr, ScalarExpr) {
    let db = b.diff(Var::T);
    let first = ScalarExpr::int(4) * b * k.diff(Var::T) + k * &db;
    let second = ScalarExpr::int(2) * b * db.diff(Var::T) - ScalarExpr::int(3) * &db * &db;
    (first, second)
}

fn check_b(b: &ScalarExpr) -> Result<()> {
    if b.is_zero() {
        return Err(Error::InvalidCoefficient("b must be nonzero".into()));
    }
    if !b.is_t_only() {
        return Err(Error::InvalidCoefficient(format!(
            "b = {b} depends on x or p"
        )));
    }
    Ok(())
}

/// `(b₀, α)` with `b = b₀ t^α`, if `t b′/b` is constant.
pub fn power_law(b: &ScalarExpr) -> Option<(Rational, Rational)> {
    let inv = b.try_inverse().ok()?;
    let alpha = (ScalarExpr::t() * b.diff(Var::T) * inv).constant_value()?;
    let scale = ScalarExpr::t_pow(&-alpha.clone()).ok()?;
    let b0 = (b * scale).constant_value()?;
    Some((b0, alpha))
}

/// `K` with `4bK′ + Kb′ = 0` when `1/b` is a constant or the square of a linear polynomial.
fn standard_multiplier(b: &ScalarExpr) -> Option<ScalarExpr> {
    let inv = b.try_inverse().ok()?;
    let mut terms = inv.terms();
    let (sig, rf) = terms.next()?;
    if terms.next().is_some() || !sig.is_one() || !rf.den().is_empty() {
        return None;
    }
    let mut a = [Rational::zero(), Rational::zero(), Rational::zero()];
    for (m, c) in rf.num().terms() {
        if m.t > 2 {
            return None;
        }
        a[m.t as usize] = c.clone();
    }
    let [a0, a1, a2] = a;
    if a2.is_zero() {
        return a1.is_zero().then(ScalarExpr::one);
    }
    if &a1 * &a1 != Rational::from_integer(4.into()) * &a2 * &a0 {
        return None;
    }
    let r = -a1 / (Rational::from_integer(2.into()) * a2);
    ScalarExpr::linear_pow(&Rational::one(), &-r, &Rational::new(1.into(), 2.into())).ok()
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    Rational::from_integer(out)
}

/// `∫ u^{j} √u` expressed back in `t`, where `u = t + b` or `u = b − t`.
fn root_power(orient: Orient, b: &Rational, e: &Rational) -> Result<ScalarExpr> {
    let c1 = match orient {
        Orient::Plus => Rational::one(),
        Orient::Minus => -Rational::one(),
    };
    ScalarExpr::linear_pow(&c1, b, e)
}

fn integrate_root_term(sig: &Sig, rf: &RatFunc) -> Result<ScalarExpr> {
    let root = sig.roots.iter().next().expect("one root");
    let shift = root.shift();
    let mut n = 0u32;
    for (b, k) in rf.den() {
        if *b != shift {
            return Err(Error::NonIntegrableInFamily(format!(
                "mixed linear factors (t + {b}) and the square root {root}"
            )));
        }
        n = *k;
    }
    // t = s·u + c
    let (s, c, dsign, den_sign) = match root.orient {
        Orient::Plus => (
            Rational::one(),
            -root.b.clone(),
            Rational::one(),
            Rational::one(),
        ),
        Orient::Minus => (
            -Rational::one(),
            root.b.clone(),
            -Rational::one(),
            if n.is_multiple_of(2) {
                Rational::one()
            } else {
                -Rational::one()
            },
        ),
    };
    let mut in_u: Vec<Rational> = Vec::new();
    for (m, a) in rf.num().terms() {
        for j in 0..=m.t {
            let coeff = a
                * binomial(m.t, j)
                * num_traits::pow(s.clone(), j as usize)
                * num_traits::pow(c.clone(), (m.t - j) as usize);
            if in_u.len() <= j as usize {
                in_u.resize(j as usize + 1, Rational::zero());
            }
            in_u[j as usize] += coeff;
        }
    }
    let constant = ScalarExpr::from_term(
        Sig {
            roots: Default::default(),
            ..sig.clone()
        },
        RatFunc::from_poly(Poly::constant(Rational::one())),
    );
    let mut out = ScalarExpr::zero();
    for (j, q) in in_u.iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let e = Rational::from_integer((j as i64 - n as i64).into())
            + Rational::new(3.into(), 2.into());
        let coeff = q * &dsign / &den_sign / &e;
        out = out + root_power(root.orient, &root.b, &e)?.scale(&coeff);
    }
    Ok(out * constant)
}

/// Exact antiderivative of a `t`-only expression, failing when a logarithm or an integral
/// outside the family would be needed.
pub fn antiderivative(f: &ScalarExpr) -> Result<ScalarExpr> {
    if !f.is_t_only() {
        return Err(Error::InvalidCoefficient(format!("{f} depends on x or p")));
    }
    let mut out = ScalarExpr::zero();
    for (sig, rf) in f.terms() {
        match sig.roots.len() {
            0 => {
                let constant = ScalarExpr::from_term(
                    sig.clone(),
                    RatFunc::from_poly(Poly::constant(Rational::one())),
                );
                for ((_, _, atom), c) in rf.atoms() {
                    let piece = match atom {
                        TAtom::Pow(k) => ScalarExpr::monomial(
                            c / Rational::from_integer((k + 1).into()),
                            0,
                            0,
                            k + 1,
                        ),
                        TAtom::Pole(b, 1) => {
                            return Err(Error::NonIntegrableInFamily(format!(
                                "integral of (t + {b})^-1 is a logarithm"
                            )))
                        }
                        TAtom::Pole(b, k) => {
                            let e = 1 - k as i64;
                            ScalarExpr::from_ratfunc(RatFunc::linear_power(&b, e))
                                .scale(&(c / Rational::from_integer(e.into())))
                        }
                    };
                    out = out + piece * &constant;
                }
            }
            1 => out = out + integrate_root_term(sig, rf)?,
            _ => {
                return Err(Error::NonIntegrableInFamily(format!(
                    "product of several square roots in {f}"
                )))
            }
        }
    }
    Ok(out)
}

/// Heisenberg generators `t∂_x − (x/2)u∂_u`, `∂_x`, `(∫b)∂_y − (y/2)u∂_u`, `∂_y`, `u∂_u`.
pub fn h2_basis_for_b(b: &ScalarExpr) -> Result<[VectorField; 5]> {
    check_b(b)?;
    let big_b = antiderivative(b)?;
    let z = ScalarExpr::zero;
    let half = Rational::new((-1).into(), 2.into());
    Ok([
        VectorField::new(z(), ScalarExpr::t(), z(), ScalarExpr::x().scale(&half)),
        VectorField::new(z(), ScalarExpr::one(), z(), z()),
        VectorField::new(z(), z(), big_b, ScalarExpr::p().scale(&half)),
        VectorField::new(z(), z(), ScalarExpr::one(), z()),
        VectorField::new(z(), z(), z(), ScalarExpr::one()),
    ])
}

/// `2t∂_t + x∂_x + (α + 1) y∂_y`
pub fn power_law_generator(alpha: &Rational) -> VectorField {
    VectorField::new(
        ScalarExpr::int(2) * ScalarExpr::t(),
        ScalarExpr::x(),
        ScalarExpr::p().scale(&(alpha + Rational::one())),
        ScalarExpr::zero(),
    )
}

/// Each generator must satisfy `[L_b, A] = ξ L_b` for `L_b = ∂_t − ∂_x² − b ∂_y²`.
pub fn verify_generators_for_b(b: &ScalarExpr, gens: &[VectorField]) -> Result<CheckReport> {
    let l = general_operator(&ScalarExpr::one(), b)?;
    let mut report = CheckReport::default();
    for (i, g) in gens.iter().enumerate() {
        let xi = check_symmetry(&l, &vf_to_operator(g));
        report.push(Check::new(
            format!("generator {} is a symmetry", i + 1),
            xi.is_some(),
            match xi {
                Some(x) => format!("{g}: xi = {x}"),
                None => format!("{g}: not a symmetry"),
            },
        ));
    }
    Ok(report)
}

pub fn classify_b(b: &ScalarExpr) -> Result<BClassification> {
    check_b(b)?;
    let (_, obstruction) = standard_form_conditions(b, &ScalarExpr::one());
    let power = power_law(b);
    let reducible = obstruction.is_zero();
    let class = if reducible {
        BClass::StandardReducible
    } else if power.is_some() {
        BClass::PowerLaw
    } else {
        BClass::Generic
    };
    let dimension = match class {
        BClass::StandardReducible => 9,
        BClass::PowerLaw => 6,
        BClass::Generic => 5,
    };
    let k = if reducible {
        standard_multiplier(b)
    } else {
        None
    };
    let mut generators: Vec<VectorField> = match h2_basis_for_b(b) {
        Ok(h) => h.to_vec(),
        Err(Error::NonIntegrableInFamily(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    if let Some((_, alpha)) = &power {
        if !generators.is_empty() {
            generators.push(power_law_generator(alpha));
        }
    }
    let mut verification = verify_generators_for_b(b, &generators)?;
    if let Some(k) = &k {
        let (r1, r2) = standard_form_conditions(b, k);
        verification.push(Check::new(
            "standard-form conditions",
            r1.is_zero() && r2.is_zero(),
            format!("K = {k}: residuals ({r1}, {r2})"),
        ));
    }
    Ok(BClassification {
        b: b.clone(),
        class,
        power: power
            .as_ref()
            .map(|(b0, a)| (b0.to_string(), a.to_string())),
        maximal: reducible,
        dimension,
        obstruction,
        k,
        generators,
        verification,
    })
}

impl BClassification {
    /// `α` of a power law as `f64`, for display.
    pub fn alpha_f64(&self) -> Option<f64> {
        let (_, a) = self.power.as_ref()?;
        a.parse::<Rational>().ok()?.to_f64()
    }
}
