//! Closed-form solutions: heat and Hermite polynomials, Gaussian kernels, the squeezed thermal
//! distribution, duals, products and the lift from `u_t = u_xx − u_yy`.

use serde::Serialize;

use crate::check::{Check, CheckReport};
use crate::error::{Error, Result};
use crate::gaussian::GaussianExpr;
use crate::operator::{psde_operator, DiffOperator};
use crate::scalar::{BigReal, LinearImage, Real, ScalarExpr, Substitution, Var};
use crate::symmetry::make_generator_a;
use crate::Rational;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest polynomial degree accepted by the constructors.
pub const MAX_DEGREE: u32 = 64;

fn check_degree(n: u32) -> Result<()> {
    if n > MAX_DEGREE {
        Err(Error::InvalidParameter(format!(
            "degree {n} exceeds the bound {MAX_DEGREE}"
        )))
    } else {
        Ok(())
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `v_n(a·x, s) = Σ_k n!/((n−2k)! k!) (a x)^{n−2k} s^k`
pub fn heat_polynomial_in(n: u32, a: &Rational, s: &ScalarExpr) -> ScalarExpr {
    let ax = ScalarExpr::x().scale(a);
    let mut out = ScalarExpr::zero();
    for k in 0..=n / 2 {
        let c = Rational::from_integer(factorial(n))
            / Rational::from_integer(factorial(n - 2 * k) * factorial(k));
        out = out + (ax.pow(n - 2 * k) * s.pow(k)).scale(&c);
    }
    out
}

/// `v_n(x, t)`, or `v_n(2x, t)` when `scaled`.
pub fn heat_polynomial(n: u32, scaled: bool) -> Result<GaussianExpr> {
    check_degree(n)?;
    let a = Rational::from_integer(if scaled { 2 } else { 1 }.into());
    Ok(GaussianExpr::scalar(heat_polynomial_in(
        n,
        &a,
        &ScalarExpr::t(),
    )))
}

/// `A_5^n · 1` by repeated application of `2x + t ∂_x`.
pub fn a5_power_on_one(n: u32) -> ScalarExpr {
    let a5 = make_generator_a(5).expect("index in range");
    operator_power_on_one(&a5, n)
}

/// `R^n · 1` by iteration.
pub fn operator_power_on_one(r: &DiffOperator, n: u32) -> ScalarExpr {
    let mut out = ScalarExpr::one();
    for _ in 0..n {
        out = r.apply_scalar(&out);
    }
    out
}

/// Physicists' Hermite polynomial `H_n(x) = v_n(2x, −1)`.
pub fn hermite(n: u32) -> Result<GaussianExpr> {
    check_degree(n)?;
    Ok(GaussianExpr::scalar(heat_polynomial_in(
        n,
        &Rational::from_integer(2.into()),
        &ScalarExpr::int(-1),
    )))
}

/// `H̃_n(α, β; x) = v_n(αx, −β)`, the polynomials generated by `exp(λαx − βλ²)`.
///
/// For `α ≠ 0` this equals `(αx − (2β/α) d/dx)^n · 1`.
pub fn generalized_hermite(n: u32, alpha: &Rational, beta: &Rational) -> Result<GaussianExpr> {
    check_degree(n)?;
    Ok(GaussianExpr::scalar(heat_polynomial_in(
        n,
        alpha,
        &ScalarExpr::constant(-beta.clone()),
    )))
}

/// `αx − β d/dx`
pub fn raising_operator(alpha: &Rational, beta: &Rational) -> DiffOperator {
    DiffOperator::scalar(ScalarExpr::x().scale(alpha)).add(&DiffOperator::monomial(
        ScalarExpr::constant(-beta.clone()),
        (0, 1, 0),
    ))
}

/// `(αx − β d/dx)^n · 1` by operator iteration; equals `v_n(αx, −αβ/2)`.
pub fn raising_operator_power(n: u32, alpha: &Rational, beta: &Rational) -> Result<GaussianExpr> {
    check_degree(n)?;
    Ok(GaussianExpr::scalar(operator_power_on_one(
        &raising_operator(alpha, beta),
        n,
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KernelKind {
    XSide,
    PSide,
    TwoSided,
}

/// Data of the kernels: `x0, t0` for the `x` side and `p0, t1` for the `p` side.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelParams {
    pub x0: Rational,
    pub t0: Rational,
    pub p0: Rational,
    pub t1: Rational,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            x0: Rational::zero(),
            t0: Rational::zero(),
            p0: Rational::zero(),
            t1: Rational::one(),
        }
    }
}

fn half(k: i64) -> Rational {
    Rational::new(k.into(), 2.into())
}

/// `(π(t − t0))^{-1/2} exp(−(x − x0)²/(t − t0))`, normalized to unit mass in `x`.
pub fn x_kernel(x0: &Rational, t0: &Rational) -> Result<GaussianExpr> {
    let pre = ScalarExpr::pi_pow_half(-1)
        * ScalarExpr::linear_pow(&Rational::one(), &-t0.clone(), &half(-1))?;
    let dx = ScalarExpr::x() - ScalarExpr::constant(x0.clone());
    let inv = ScalarExpr::linear_pow(&Rational::one(), &-t0.clone(), &-Rational::one())?;
    GaussianExpr::term(pre, -(dx.pow(2) * inv))
}

/// `(t t1/(π(t1 − t)))^{1/2} exp(−t t1 (p − p0)²/(t1 − t))`, real and of unit mass in `p` for
/// `0 < t < t1`.
pub fn p_kernel(p0: &Rational, t1: &Rational) -> Result<GaussianExpr> {
    if !t1.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "t1 = {t1} must be positive"
        )));
    }
    let pre = ScalarExpr::pi_pow_half(-1)
        * ScalarExpr::rational_pow(t1, &half(1))?
        * ScalarExpr::t_pow(&half(1))?
        * ScalarExpr::linear_pow(&-Rational::one(), t1, &half(-1))?;
    let dp = ScalarExpr::p() - ScalarExpr::constant(p0.clone());
    let inv = ScalarExpr::linear_pow(&-Rational::one(), t1, &-Rational::one())?;
    GaussianExpr::term(pre, -(dp.pow(2) * ScalarExpr::t().scale(t1) * inv))
}

/// One of the three kernels; the two-sided kernel is the product of the one-sided ones.
pub fn kernel(kind: KernelKind, params: &KernelParams) -> Result<GaussianExpr> {
    match kind {
        KernelKind::XSide => x_kernel(&params.x0, &params.t0),
        KernelKind::PSide => p_kernel(&params.p0, &params.t1),
        KernelKind::TwoSided => {
            if params.t0 >= params.t1 {
                return Err(Error::InvalidWindow {
                    t0: params.t0.to_string(),
                    t1: params.t1.to_string(),
                });
            }
            Ok(x_kernel(&params.x0, &params.t0)? * p_kernel(&params.p0, &params.t1)?)
        }
    }
}

/// `2((a + t)(a + 1/t))^{-1/2} exp(−x²/(a + t) − p²/(a + 1/t))` with `a = 2n̄ + 1`.
pub fn thermal(nbar: &Rational) -> Result<GaussianExpr> {
    let a = Rational::from_integer(2.into()) * nbar + Rational::one();
    if !a.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "2*nbar + 1 = {a} must be positive"
        )));
    }
    let one = Rational::one();
    // a + 1/t = a (t + 1/a) / t
    let inv_a = &one / &a;
    let pre = ScalarExpr::int(2)
        * ScalarExpr::linear_pow(&one, &a, &half(-1))?
        * ScalarExpr::rational_pow(&a, &half(-1))?
        * ScalarExpr::t_pow(&half(1))?
        * ScalarExpr::linear_pow(&one, &inv_a, &half(-1))?;
    let ex = -(ScalarExpr::x().pow(2) * ScalarExpr::linear_pow(&one, &a, &-one.clone())?)
        - (ScalarExpr::p().pow(2)
            * ScalarExpr::t().scale(&inv_a)
            * ScalarExpr::linear_pow(&one, &inv_a, &-one.clone())?);
    GaussianExpr::term(pre, ex)
}

/// `ψ(p, x, 1/t)`
pub fn dual(psi: &GaussianExpr) -> Result<GaussianExpr> {
    psi.subst(&Substitution::exchange())
}

/// `L ψ` for the pseudo-diffusion operator.
pub fn psde_residual(psi: &GaussianExpr) -> GaussianExpr {
    psde_operator().apply(psi)
}

/// `∂_t − ¼ ∂_x²`
pub fn x_heat_operator() -> DiffOperator {
    DiffOperator::partial(Var::T).add(&DiffOperator::monomial(ScalarExpr::frac(-1, 4), (0, 2, 0)))
}

/// `∂_t + (1/(4t²)) ∂_p²`
pub fn p_backward_operator() -> DiffOperator {
    let c = ScalarExpr::frac(1, 4) * ScalarExpr::t().pow_int(-2).expect("t is invertible");
    DiffOperator::partial(Var::T).add(&DiffOperator::monomial(c, (0, 0, 2)))
}

/// `f(x,t)·g(p,t)` after checking that `f` solves the `x` heat equation and `g` the backward
/// `p` equation.
pub fn product(f: &GaussianExpr, g: &GaussianExpr) -> Result<GaussianExpr> {
    if f.depends_on(Var::P) {
        return Err(Error::PreconditionViolated(format!("f = {f} depends on p")));
    }
    if g.depends_on(Var::X) {
        return Err(Error::PreconditionViolated(format!("g = {g} depends on x")));
    }
    let rf = x_heat_operator().apply(f);
    if !rf.is_zero() {
        return Err(Error::PreconditionViolated(format!(
            "f is not a solution of the x equation: residual {rf}"
        )));
    }
    let rg = p_backward_operator().apply(g);
    if !rg.is_zero() {
        return Err(Error::PreconditionViolated(format!(
            "g is not a solution of the p equation: residual {rg}"
        )));
    }
    Ok(f * g)
}

/// `∂_t − ∂_x² + ∂_y²` with `y` in the `p` slot.
pub fn standard_operator() -> DiffOperator {
    DiffOperator::partial(Var::T)
        .add(&DiffOperator::monomial(ScalarExpr::int(-1), (0, 2, 0)))
        .add(&DiffOperator::monomial(ScalarExpr::one(), (0, 0, 2)))
}

/// `∂_t − ∂_x² + t^{-2} ∂_p²`
pub fn unscaled_psde_operator() -> DiffOperator {
    let c = ScalarExpr::t().pow_int(-2).expect("t is invertible");
    DiffOperator::partial(Var::T)
        .add(&DiffOperator::monomial(ScalarExpr::int(-1), (0, 2, 0)))
        .add(&DiffOperator::monomial(c, (0, 0, 2)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LiftTarget {
    /// `∂_t − ¼∂_x² + (1/(4t²))∂_p²`
    Psde,
    /// `∂_t − ∂_x² + t^{-2}∂_p²`
    Unscaled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lift {
    pub q: GaussianExpr,
    pub matched: LiftTarget,
    pub psde_residual: GaussianExpr,
    pub unscaled_residual: GaussianExpr,
    /// `Q(2x, 2p, t)`, which solves the pseudo-diffusion equation whenever `Q` solves the
    /// unscaled one.
    pub rescaled: GaussianExpr,
    pub rescaled_psde_residual: GaussianExpr,
}

/// Relation between the two operators: `L[Q(2x, 2p, t)] = (L_u Q)(2x, 2p, t)`.
pub const SCALE_RELATION: &str = "Q(x, p, t) solves dQ/dt = Q_xx - t^-2 Q_pp iff Q(2x, 2p, t) solves the pseudo-diffusion equation";

/// `ψ(2x, 2p, t)`
pub fn double_xp(psi: &GaussianExpr) -> Result<GaussianExpr> {
    let two = ScalarExpr::int(2);
    psi.subst(
        &Substitution::identity()
            .with_x(LinearImage::new(
                two.clone(),
                ScalarExpr::zero(),
                ScalarExpr::zero(),
            ))
            .with_p(LinearImage::new(
                ScalarExpr::zero(),
                two,
                ScalarExpr::zero(),
            )),
    )
}

/// `Q = t^{1/2} exp(−tp²/4) u(x, pt, t)` for a solution `u(x, y, t)` of `u_t = u_xx − u_yy`
/// (`y` in the `p` slot), together with the operator that annihilates it.
pub fn lift_standard(u: &GaussianExpr) -> Result<Lift> {
    let r = standard_operator().apply(u);
    if !r.is_zero() {
        return Err(Error::PreconditionViolated(format!(
            "u does not solve u_t = u_xx - u_yy: residual {r}"
        )));
    }
    let sub = Substitution::identity().with_p(LinearImage::new(
        ScalarExpr::zero(),
        ScalarExpr::t(),
        ScalarExpr::zero(),
    ));
    let factor = GaussianExpr::term(
        ScalarExpr::t_pow(&half(1))?,
        -(ScalarExpr::t() * ScalarExpr::p().pow(2)).scale(&Rational::new(1.into(), 4.into())),
    )?;
    let q = factor * u.subst(&sub)?;
    let psde_residual = psde_operator().apply(&q);
    let unscaled_residual = unscaled_psde_operator().apply(&q);
    let matched = if psde_residual.is_zero() {
        LiftTarget::Psde
    } else if unscaled_residual.is_zero() {
        LiftTarget::Unscaled
    } else {
        return Err(Error::NoOperatorMatched);
    };
    let rescaled = double_xp(&q)?;
    let rescaled_psde_residual = psde_operator().apply(&rescaled);
    Ok(Lift {
        q,
        matched,
        psde_residual,
        unscaled_residual,
        rescaled,
        rescaled_psde_residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SeriesFamily {
    /// `exp(2λx + λ²t) = Σ λⁿ/n! v_n(2x, t)`
    Heat,
    /// `exp(2λx − λ²) = Σ λⁿ/n! H_n(x)`
    Hermite,
    /// `exp(λαx − βλ²) = Σ λⁿ/n! H̃_n(α, β; x)`
    Ghp {
        #[serde(serialize_with = "crate::ser_rational")]
        alpha: Rational,
        #[serde(serialize_with = "crate::ser_rational")]
        beta: Rational,
    },
}

impl SeriesFamily {
    /// `(a, s)` with the generating exponent `λ a x + λ² s`.
    fn exponent_data(&self) -> (Rational, ScalarExpr) {
        match self {
            SeriesFamily::Heat => (Rational::from_integer(2.into()), ScalarExpr::t()),
            SeriesFamily::Hermite => (Rational::from_integer(2.into()), ScalarExpr::int(-1)),
            SeriesFamily::Ghp { alpha, beta } => {
                (alpha.clone(), ScalarExpr::constant(-beta.clone()))
            }
        }
    }

    /// The closed-form polynomial of degree `n`.
    pub fn polynomial(&self, n: u32) -> ScalarExpr {
        let (a, s) = self.exponent_data();
        heat_polynomial_in(n, &a, &s)
    }

    /// The raising operator `a x + (2s/a) d/dx` whose powers on `1` give the polynomials.
    pub fn operator(&self) -> Option<DiffOperator> {
        let (a, s) = self.exponent_data();
        if a.is_zero() {
            return None;
        }
        let c = s.scale(&(Rational::from_integer(2.into()) / &a));
        Some(
            DiffOperator::scalar(ScalarExpr::x().scale(&a))
                .add(&DiffOperator::monomial(c, (0, 1, 0))),
        )
    }
}

/// `n! · [λⁿ] exp(λ a x + λ² s) = Σ_{i+2j=n} n!/(i! j!) (a x)^i s^j`, expanded from the
/// product of the two exponential series.
fn series_coefficient(n: u32, a: &Rational, s: &ScalarExpr) -> ScalarExpr {
    let mut out = ScalarExpr::zero();
    for j in 0..=n / 2 {
        let i = n - 2 * j;
        let c = Rational::from_integer(factorial(n))
            / Rational::from_integer(factorial(i) * factorial(j));
        out = out + (ScalarExpr::x().scale(a).pow(i) * s.pow(j)).scale(&c);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub t: f64,
    pub partial_sum: f64,
    pub exact: f64,
    pub remainder: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesReport {
    pub checks: CheckReport,
    pub points: Vec<SeriesPoint>,
}

impl SeriesReport {
    pub fn passed(&self) -> bool {
        self.checks.passed() && self.points.iter().all(|p| p.passed)
    }
}

const TAIL_TERMS: u32 = 16;

/// Compare the first `n_max + 1` polynomials with the Taylor coefficients of the generating
/// function, and the truncated series with the generating function at `points` (pairs
/// `(x, t)`), evaluated with `precision_bits` bits. The numeric bound is the sum of the
/// magnitudes of the next 16 omitted terms.
pub fn generating_series_residual(
    n_max: u32,
    lambda: &Rational,
    family: &SeriesFamily,
    points: &[(Rational, Rational)],
    precision_bits: usize,
) -> Result<SeriesReport> {
    check_degree(n_max + TAIL_TERMS)?;
    let (a, s) = family.exponent_data();
    let mut checks = CheckReport::default();
    let op = family.operator();
    for n in 0..=n_max {
        let coeff = series_coefficient(n, &a, &s);
        let closed = family.polynomial(n);
        checks.push(Check::new(
            format!("n = {n}: closed form equals n! times the series coefficient"),
            closed == coeff,
            format!("{closed}"),
        ));
        if let Some(op) = &op {
            let iter = operator_power_on_one(op, n);
            checks.push(Check::new(
                format!("n = {n}: operator power on 1 equals n! times the series coefficient"),
                iter == coeff,
                format!("{iter}"),
            ));
        }
    }
    let prec = precision_bits + crate::scalar::GUARD_BITS;
    let mut out_points = Vec::new();
    for (x, t) in points {
        let bx = BigReal::from_rational(x, prec);
        let bt = BigReal::from_rational(t, prec);
        let zero = BigReal::from_rational(&Rational::zero(), prec);
        let term = |n: u32| -> Result<BigReal> {
            let c = family.polynomial(n).scale(
                &(num_traits::pow(lambda.clone(), n as usize)
                    / Rational::from_integer(factorial(n))),
            );
            c.eval_with(&bx, &zero, &bt, prec)
        };
        let mut sum = zero.clone();
        for n in 0..=n_max {
            sum = sum.add(&term(n)?);
        }
        let lam = BigReal::from_rational(lambda, prec);
        let ax = BigReal::from_rational(&a, prec).mul(&bx);
        let sv = s.eval_with(&bx, &zero, &bt, prec)?;
        let exact = lam.mul(&ax).add(&lam.mul(&lam).mul(&sv)).exp();
        let remainder = exact.sub(&sum).to_f64().abs();
        let mut bound = 0.0;
        for n in n_max + 1..=n_max + TAIL_TERMS {
            bound += term(n)?.to_f64().abs();
        }
        out_points.push(SeriesPoint {
            x: x.to_f64().unwrap_or(f64::NAN),
            t: t.to_f64().unwrap_or(f64::NAN),
            partial_sum: sum.to_f64(),
            exact: exact.to_f64(),
            remainder,
            bound,
            passed: remainder <= bound,
        });
    }
    Ok(SeriesReport {
        checks,
        points: out_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn s(src: &str) -> ScalarExpr {
        src.parse().unwrap()
    }

    fn g(src: &str) -> GaussianExpr {
        src.parse().unwrap()
    }

    #[test]
    fn polynomials() {
        assert_eq!(heat_polynomial(2, true).unwrap(), g("4*x^2 + 2*t"));
        assert_eq!(heat_polynomial(0, true).unwrap(), GaussianExpr::one());
        assert_eq!(
            heat_polynomial(4, true).unwrap(),
            g("16*x^4 + 48*x^2*t + 12*t^2")
        );
        for n in 0..=12 {
            assert_eq!(
                heat_polynomial(n, true).unwrap(),
                GaussianExpr::scalar(a5_power_on_one(n))
            );
            assert!(psde_residual(&heat_polynomial(n, true).unwrap()).is_zero());
        }
        assert_eq!(hermite(3).unwrap(), g("8*x^3 - 12*x"));
        assert_eq!(hermite(2).unwrap(), g("4*x^2 - 2"));
        let one = rat(1, 1);
        assert_eq!(generalized_hermite(2, &one, &one).unwrap(), g("x^2 - 2"));
        assert_eq!(
            generalized_hermite(5, &one, &one).unwrap(),
            g("x^5 - 20*x^3 + 60*x")
        );
        for n in 0..10 {
            assert_eq!(
                generalized_hermite(n, &rat(2, 1), &one).unwrap(),
                hermite(n).unwrap()
            );
            assert_eq!(
                raising_operator_power(n, &rat(2, 1), &one).unwrap(),
                hermite(n).unwrap()
            );
        }
        assert_eq!(raising_operator_power(2, &one, &one).unwrap(), g("x^2 - 1"));
        assert!(heat_polynomial(65, false).is_err());
    }

    #[test]
    fn kernels() {
        let p = KernelParams {
            x0: rat(1, 3),
            t0: rat(1, 2),
            p0: rat(-1, 1),
            t1: rat(3, 1),
        };
        for kind in [KernelKind::XSide, KernelKind::TwoSided] {
            let k = kernel(kind, &p).unwrap();
            assert!(psde_residual(&k).is_zero(), "{kind:?}");
        }
        let kp = kernel(KernelKind::PSide, &p).unwrap();
        assert!(p_backward_operator().apply(&kp).is_zero());
        let kx = kernel(KernelKind::XSide, &KernelParams::default()).unwrap();
        assert_eq!(kx, g("pi^-1/2*t^-1/2*exp(-x^2*t^-1)"));
        let bad = KernelParams {
            t0: rat(2, 1),
            t1: rat(1, 1),
            ..KernelParams::default()
        };
        assert!(matches!(
            kernel(KernelKind::TwoSided, &bad),
            Err(Error::InvalidWindow { .. })
        ));
        let v = kernel(KernelKind::TwoSided, &p)
            .unwrap()
            .eval_f64(0.2, -0.5, 1.0)
            .unwrap();
        let expect = (3.0f64).sqrt() / (std::f64::consts::PI * (0.5f64 * 2.0).sqrt())
            * (-(0.2f64 - 1.0 / 3.0).powi(2) / 0.5 - 3.0 * 0.25 / 2.0).exp();
        assert!((v - expect).abs() < 1e-14);
    }

    #[test]
    fn thermal_distribution() {
        let q = thermal(&rat(0, 1)).unwrap();
        assert!(psde_residual(&q).is_zero());
        let v = q.eval_f64(0.3, -0.7, 1.0).unwrap();
        assert!((v - (-(0.09f64 + 0.49) / 2.0).exp()).abs() < 1e-15);
        let q = thermal(&rat(3, 2)).unwrap();
        assert!(psde_residual(&q).is_zero());
        let v = q.eval_f64(0.3, -0.7, 1.0).unwrap();
        assert!((v - (-(0.09f64 + 0.49) / 5.0).exp() / 2.5).abs() < 1e-15);
        assert!(thermal(&rat(-1, 2)).is_err());
    }

    #[test]
    fn duals_and_products() {
        assert_eq!(dual(&g("x")).unwrap(), g("p"));
        let kx = kernel(KernelKind::XSide, &KernelParams::default()).unwrap();
        let d = dual(&kx).unwrap();
        assert!(p_backward_operator().apply(&d).is_zero());
        for psi in [
            kx.clone(),
            thermal(&rat(1, 3)).unwrap(),
            heat_polynomial(3, true).unwrap(),
        ] {
            assert_eq!(dual(&dual(&psi).unwrap()).unwrap(), psi);
            assert!(psde_residual(&dual(&psi).unwrap()).is_zero());
        }
        let f = heat_polynomial(2, true).unwrap();
        assert_eq!(product(&f, &GaussianExpr::one()).unwrap(), f);
        let kp = kernel(KernelKind::PSide, &KernelParams::default()).unwrap();
        assert_eq!(
            product(&kx, &kp).unwrap(),
            kernel(
                KernelKind::TwoSided,
                &KernelParams {
                    t0: rat(0, 1),
                    ..KernelParams::default()
                }
            )
            .unwrap()
        );
        assert!(matches!(
            product(&g("x^2"), &GaussianExpr::one()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn lifts() {
        let l = lift_standard(&GaussianExpr::one()).unwrap();
        assert_eq!(l.matched, LiftTarget::Unscaled);
        assert_eq!(l.q, g("t^1/2*exp(-1/4*t*p^2)"));
        let l = lift_standard(&g("x")).unwrap();
        assert_eq!(l.matched, LiftTarget::Unscaled);
        let l = lift_standard(&g("x^2 + p^2")).unwrap();
        assert!(l.unscaled_residual.is_zero());
        assert!(l.rescaled_psde_residual.is_zero());
        assert!(!l.psde_residual.is_zero());
        assert!(matches!(
            lift_standard(&g("x^2")),
            Err(Error::PreconditionViolated(_))
        ));
        let _ = s("t");
    }

    #[test]
    fn series() {
        let r = generating_series_residual(
            8,
            &rat(1, 2),
            &SeriesFamily::Hermite,
            &[(rat(1, 1), rat(0, 1))],
            128,
        )
        .unwrap();
        assert!(r.passed(), "{r:?}");
        let r = generating_series_residual(0, &rat(1, 2), &SeriesFamily::Heat, &[], 128).unwrap();
        assert!(r.passed());
        assert_eq!(SeriesFamily::Heat.polynomial(3), s("8*x^3 + 12*x*t"));
        let ghp = SeriesFamily::Ghp {
            alpha: rat(3, 2),
            beta: rat(1, 3),
        };
        let r = generating_series_residual(6, &rat(1, 3), &ghp, &[(rat(1, 2), rat(0, 1))], 128)
            .unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
