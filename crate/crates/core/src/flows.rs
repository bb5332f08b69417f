//! One-parameter groups `G_i`: exact closed-form actions on Gaussian expressions and a numeric
//! Runge–Kutta integrator for the defining flows.
//!
//! The actions follow the classical parametrization in which `G_3(λ) = exp(−λ A_3)`; every other
//! `G_i(λ)` is `exp(λ A_i)`. [`group_generator`] returns the operator that is exponentiated.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::check::{Check, CheckReport};
use crate::error::{Error, Result};
use crate::gaussian::GaussianExpr;
use crate::operator::{psde_operator, DiffOperator};
use crate::scalar::{CompiledScalar, LinearImage, ScalarExpr, Substitution, TMap};
use crate::solutions::{heat_polynomial, p_kernel, thermal, x_kernel};
use crate::symmetry::make_generator_a;
use crate::Rational;

/// Group parameter in the exact family of a generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupParam {
    Lambda(Rational),
    /// `s = e^λ > 0`, used by `G_2`.
    Scale(Rational),
    /// `(c, s) = (cosh λ, sinh λ)` with `c² − s² = 1`, used by `G_4`.
    Hyperbola {
        c: Rational,
        s: Rational,
    },
}

impl GroupParam {
    pub fn lambda(n: i64, d: i64) -> Self {
        GroupParam::Lambda(crate::rat(n, d))
    }

    pub fn identity_for(i: usize) -> Self {
        match i {
            2 => GroupParam::Scale(Rational::one()),
            4 => GroupParam::Hyperbola {
                c: Rational::one(),
                s: Rational::zero(),
            },
            _ => GroupParam::Lambda(Rational::zero()),
        }
    }

    /// Parameter of `G_i(self) ∘ G_i(other)`.
    pub fn compose(&self, other: &GroupParam) -> Result<GroupParam> {
        match (self, other) {
            (GroupParam::Lambda(a), GroupParam::Lambda(b)) => Ok(GroupParam::Lambda(a + b)),
            (GroupParam::Scale(a), GroupParam::Scale(b)) => Ok(GroupParam::Scale(a * b)),
            (GroupParam::Hyperbola { c, s }, GroupParam::Hyperbola { c: c2, s: s2 }) => {
                Ok(GroupParam::Hyperbola {
                    c: c * c2 + s * s2,
                    s: c * s2 + s * c2,
                })
            }
            _ => Err(Error::InvalidParameter(format!(
                "cannot compose {self} with {other}"
            ))),
        }
    }

    /// `λ` as a float; for the scale and hyperbola forms this is `ln s` and `asinh s`.
    pub fn to_f64(&self) -> f64 {
        match self {
            GroupParam::Lambda(l) => l.to_f64().unwrap_or(f64::NAN),
            GroupParam::Scale(s) => s.to_f64().unwrap_or(f64::NAN).ln(),
            GroupParam::Hyperbola { s, .. } => s.to_f64().unwrap_or(f64::NAN).asinh(),
        }
    }
}

impl std::fmt::Display for GroupParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupParam::Lambda(l) => write!(f, "lambda = {l}"),
            GroupParam::Scale(s) => write!(f, "s = {s}"),
            GroupParam::Hyperbola { c, s } => write!(f, "(c, s) = ({c}, {s})"),
        }
    }
}

impl Serialize for GroupParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `σ · ψ ∘ (X, P, T)` for one generator and parameter.
#[derive(Clone, Debug, Serialize)]
pub struct GroupAction {
    pub index: usize,
    pub param: GroupParam,
    #[serde(skip)]
    pub map: Substitution,
    pub multiplier: GaussianExpr,
}

fn check_index(i: usize) -> Result<()> {
    if (1..=9).contains(&i) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange(i))
    }
}

fn out_of_family(i: usize, param: &GroupParam) -> Error {
    Error::SubstitutionOutOfFamily(format!("{param} is not an exact parameter for G{i}"))
}

fn lambda_for(i: usize, param: &GroupParam) -> Result<Rational> {
    match param {
        GroupParam::Lambda(l) => Ok(l.clone()),
        _ => Err(out_of_family(i, param)),
    }
}

/// The operator `B_i` with `G_i(λ) = exp(λ B_i)`.
pub fn group_generator(i: usize) -> Result<DiffOperator> {
    let a = make_generator_a(i)?;
    Ok(if i == 3 { a.neg() } else { a })
}

pub fn group_action(i: usize, param: &GroupParam) -> Result<GroupAction> {
    check_index(i)?;
    let x = ScalarExpr::x();
    let p = ScalarExpr::p();
    let t = ScalarExpr::t();
    let one = Rational::one();
    let half = Rational::new(1.into(), 2.into());
    let id = Substitution::identity();
    let (map, multiplier) = match i {
        1 => {
            let l = lambda_for(i, param)?;
            // t/(t+λ)
            let r = &t * ScalarExpr::linear_pow(&one, &l, &-one.clone())?;
            let pre = ScalarExpr::t_pow(&half)? * ScalarExpr::linear_pow(&one, &l, &-half.clone())?;
            let ex = -(p.pow(2) * &r).scale(&l);
            (
                id.with_p(LinearImage::new(ScalarExpr::zero(), r, ScalarExpr::zero()))
                    .with_t(TMap::Shift(l)),
                GaussianExpr::term(pre, ex)?,
            )
        }
        2 => {
            let s = match param {
                GroupParam::Scale(s) if s.is_positive() => s.clone(),
                GroupParam::Lambda(l) if l.is_zero() => one.clone(),
                _ => return Err(out_of_family(i, param)),
            };
            let map = id
                .with_x(LinearImage::new(
                    ScalarExpr::constant(s.clone()),
                    ScalarExpr::zero(),
                    ScalarExpr::zero(),
                ))
                .with_p(LinearImage::new(
                    ScalarExpr::zero(),
                    ScalarExpr::constant(&one / &s),
                    ScalarExpr::zero(),
                ))
                .with_t(TMap::Scale(&s * &s));
            (map, GaussianExpr::one())
        }
        3 => {
            let l = lambda_for(i, param)?;
            // 1/(1+λt)
            let r = ScalarExpr::linear_pow(&l, &one, &-one.clone())?;
            let pre = ScalarExpr::linear_pow(&l, &one, &-half.clone())?;
            let ex = -(x.pow(2) * &r).scale(&l);
            (
                id.with_x(LinearImage::new(r, ScalarExpr::zero(), ScalarExpr::zero()))
                    .with_t(TMap::Mobius(l)),
                GaussianExpr::term(pre, ex)?,
            )
        }
        4 => {
            let (c, s) = match param {
                GroupParam::Hyperbola { c, s } => {
                    if &(c * c) - &(s * s) != one || !c.is_positive() {
                        return Err(Error::SubstitutionOutOfFamily(format!(
                            "({c}, {s}) is not on the branch c^2 - s^2 = 1, c > 0"
                        )));
                    }
                    (c.clone(), s.clone())
                }
                GroupParam::Lambda(l) if l.is_zero() => (one.clone(), Rational::zero()),
                _ => return Err(out_of_family(i, param)),
            };
            let tinv = t.pow_int(-1)?;
            let map = id
                .with_x(LinearImage::new(
                    ScalarExpr::constant(c.clone()),
                    t.scale(&s),
                    ScalarExpr::zero(),
                ))
                .with_p(LinearImage::new(
                    tinv.scale(&s),
                    ScalarExpr::constant(c.clone()),
                    ScalarExpr::zero(),
                ));
            let ex = (x.pow(2) * &tinv + p.pow(2) * &t).scale(&(&s * &s))
                + (&x * &p).scale(&(Rational::from_integer(2.into()) * &c * &s));
            (map, GaussianExpr::exp(ex)?)
        }
        5 => {
            let l = lambda_for(i, param)?;
            let map = id.with_x(LinearImage::new(
                ScalarExpr::one(),
                ScalarExpr::zero(),
                t.scale(&l),
            ));
            let ex = x.scale(&(Rational::from_integer(2.into()) * &l)) + t.scale(&(&l * &l));
            (map, GaussianExpr::exp(ex)?)
        }
        6 => {
            let l = lambda_for(i, param)?;
            let tinv = t.pow_int(-1)?;
            let map = id.with_p(LinearImage::new(
                ScalarExpr::zero(),
                ScalarExpr::one(),
                tinv.scale(&l),
            ));
            let ex = p.scale(&(Rational::from_integer(2.into()) * &l)) + tinv.scale(&(&l * &l));
            (map, GaussianExpr::exp(ex)?)
        }
        7 => {
            let l = lambda_for(i, param)?;
            (
                id.with_x(LinearImage::new(
                    ScalarExpr::one(),
                    ScalarExpr::zero(),
                    ScalarExpr::constant(l),
                )),
                GaussianExpr::one(),
            )
        }
        8 => {
            let l = lambda_for(i, param)?;
            (
                id.with_p(LinearImage::new(
                    ScalarExpr::zero(),
                    ScalarExpr::one(),
                    ScalarExpr::constant(l),
                )),
                GaussianExpr::one(),
            )
        }
        _ => {
            let l = lambda_for(i, param)?;
            (id, GaussianExpr::exp(ScalarExpr::constant(l))?)
        }
    };
    Ok(GroupAction {
        index: i,
        param: param.clone(),
        map,
        multiplier,
    })
}

impl GroupAction {
    /// Whether `t` lies in the window where the coordinate map and multiplier are real.
    pub fn window_contains(&self, t: &Rational) -> bool {
        if !t.is_positive() {
            return false;
        }
        match self.map.t.apply_rational(t) {
            Some(tt) => tt.is_positive(),
            None => false,
        }
    }

    /// Apply with square-root images on the branch that is positive at `reference_t`.
    pub fn apply_at(&self, psi: &GaussianExpr, reference_t: &Rational) -> Result<GaussianExpr> {
        if !self.window_contains(reference_t) {
            return Err(Error::SubstitutionOutOfFamily(format!(
                "t = {reference_t} is outside the window of G{} at {}",
                self.index, self.param
            )));
        }
        let map = self.map.clone().with_reference(reference_t.clone());
        Ok(&self.multiplier * &psi.subst(&map)?)
    }

    /// Apply at the first admissible reference time.
    pub fn apply(&self, psi: &GaussianExpr) -> Result<GaussianExpr> {
        let mut last = None;
        for r in reference_candidates() {
            match self.apply_at(psi, &r) {
                Ok(v) => return Ok(v),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::SubstitutionOutOfFamily("no admissible window".into())))
    }
}

fn reference_candidates() -> Vec<Rational> {
    let mut out = vec![Rational::one()];
    for k in 1..=6u32 {
        let v = Rational::from_integer(num_bigint::BigInt::from(2u32.pow(k)));
        out.push(Rational::one() / &v);
        out.push(v);
    }
    out
}

pub fn apply_group(i: usize, param: &GroupParam, psi: &GaussianExpr) -> Result<GaussianExpr> {
    group_action(i, param)?.apply(psi)
}

/// Solutions used to exercise the group actions: `1`, `v_3(2x,t)`, the `x`-kernel from
/// `t0 = 0`, the thermal state with `n̄ = 1` and `(4x² + 2t)(4p² + 2/t)`.
pub fn test_solutions() -> Result<Vec<(String, GaussianExpr)>> {
    let x = ScalarExpr::x();
    let p = ScalarExpr::p();
    let t = ScalarExpr::t();
    let prod = (x.pow(2).scale(&crate::rat(4, 1)) + t.scale(&crate::rat(2, 1)))
        * (p.pow(2).scale(&crate::rat(4, 1)) + t.pow_int(-1)?.scale(&crate::rat(2, 1)));
    Ok(vec![
        ("1".into(), GaussianExpr::one()),
        ("v_3(2x,t)".into(), heat_polynomial(3, true)?),
        (
            "x kernel".into(),
            x_kernel(&Rational::zero(), &Rational::zero())?,
        ),
        ("thermal nbar=1".into(), thermal(&Rational::one())?),
        ("(4x^2+2t)(4p^2+2/t)".into(), GaussianExpr::scalar(prod)),
    ])
}

/// Exact sample parameters for generator `i`.
pub fn sample_params(i: usize) -> Vec<GroupParam> {
    let r = crate::rat;
    match i {
        2 => vec![
            GroupParam::Scale(r(2, 1)),
            GroupParam::Scale(r(1, 3)),
            GroupParam::Scale(r(3, 2)),
        ],
        4 => vec![
            GroupParam::Hyperbola {
                c: r(5, 4),
                s: r(3, 4),
            },
            GroupParam::Hyperbola {
                c: r(5, 3),
                s: r(-4, 3),
            },
            GroupParam::Hyperbola {
                c: r(13, 12),
                s: r(5, 12),
            },
        ],
        _ => vec![
            GroupParam::Lambda(r(1, 2)),
            GroupParam::Lambda(r(-1, 4)),
            GroupParam::Lambda(r(3, 2)),
        ],
    }
}

/// Pairs `(λ, μ)` for the group law.
pub fn sample_param_pairs(i: usize) -> Vec<(GroupParam, GroupParam)> {
    let p = sample_params(i);
    vec![
        (p[0].clone(), p[1].clone()),
        (p[1].clone(), p[2].clone()),
        (p[2].clone(), p[0].clone()),
    ]
}

/// `L(G_i ψ) = 0` for every sample parameter and test solution.
pub fn solution_preservation_check() -> Result<CheckReport> {
    let sols = test_solutions()?;
    let l = psde_operator();
    let cases: Vec<(usize, GroupParam)> = (1..=9)
        .flat_map(|i| sample_params(i).into_iter().map(move |p| (i, p)))
        .collect();
    let results: Vec<Result<Vec<Check>>> = cases
        .par_iter()
        .map(|(i, param)| {
            let mut out = Vec::new();
            for (name, psi) in &sols {
                let image = apply_group(*i, param, psi)?;
                let res = l.apply(&image);
                out.push(Check::new(
                    format!("G{i}({param}) maps {name} to a solution"),
                    res.is_zero(),
                    if res.is_zero() {
                        "residual 0".to_string()
                    } else {
                        format!("residual {res}")
                    },
                ));
            }
            Ok(out)
        })
        .collect();
    let mut report = CheckReport::default();
    for r in results {
        for c in r? {
            report.push(c);
        }
    }
    Ok(report)
}

/// `G_i(λ) ∘ G_i(μ) = G_i(λ ∘ μ)` on a fixed test expression, with all three actions taken on a
/// common window.
pub fn group_law_check(i: usize, lambda: &GroupParam, mu: &GroupParam) -> Result<Check> {
    let sols = test_solutions()?;
    let psi = &sols[3].1 + &sols[4].1;
    let gl = group_action(i, lambda)?;
    let gm = group_action(i, mu)?;
    let sum = lambda.compose(mu)?;
    let gs = group_action(i, &sum)?;
    let mut last = None;
    for r in reference_candidates() {
        let attempt = (|| -> Result<(GaussianExpr, GaussianExpr)> {
            let inner = gm.apply_at(&psi, &r)?;
            let lhs = gl.apply_at(&inner, &r)?;
            let rhs = gs.apply_at(&psi, &r)?;
            Ok((lhs, rhs))
        })();
        match attempt {
            Ok((lhs, rhs)) => {
                let diff = &lhs - &rhs;
                return Ok(Check::new(
                    format!("G{i}({lambda}) G{i}({mu}) = G{i}({sum})"),
                    diff.is_zero(),
                    if diff.is_zero() {
                        format!("exact on the window containing t = {r}")
                    } else {
                        format!("difference {diff}")
                    },
                ));
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::SubstitutionOutOfFamily("no common window".into())))
}

/// Group law for every generator on its sample pairs.
pub fn group_law_report() -> Result<CheckReport> {
    let mut report = CheckReport::default();
    for i in 1..=9 {
        for (a, b) in sample_param_pairs(i) {
            report.push(group_law_check(i, &a, &b)?);
        }
    }
    Ok(report)
}

/// `apply_group(i, 0, ψ) = ψ`.
pub fn identity_check() -> Result<CheckReport> {
    let sols = test_solutions()?;
    let mut report = CheckReport::default();
    for i in 1..=9 {
        for (name, psi) in &sols {
            let v = apply_group(i, &GroupParam::identity_for(i), psi)?;
            report.push(Check::new(
                format!("G{i} at the identity fixes {name}"),
                &v - psi == GaussianExpr::zero(),
                String::new(),
            ));
        }
    }
    Ok(report)
}

fn equal_up_to_constant(a: &GaussianExpr, b: &GaussianExpr) -> Option<ScalarExpr> {
    let (pa, ea) = a.single()?;
    let (pb, eb) = b.single()?;
    if ea != eb {
        return None;
    }
    let ratio = pa.pow(2) * pb.pow(2).try_inverse().ok()?;
    ratio.is_constant().then_some(ratio)
}

/// Kernels as images of `1` under `G_3(−1/t0)` and `G_1(−t1)`, and the squeezed thermal state
/// as `2γ · G_3(γ)1 · G_1(γ)1` with `1/γ = 2n̄ + 1`.
pub fn conformal_kernel_identity() -> Result<CheckReport> {
    let r = crate::rat;
    let one = GaussianExpr::one();
    let mut report = CheckReport::default();
    for t0 in [r(-1, 1), r(-1, 4)] {
        let g = apply_group(3, &GroupParam::Lambda(-Rational::one() / &t0), &one)?;
        let c = ScalarExpr::pi_pow_half(1) * ScalarExpr::rational_pow(&-t0.clone(), &r(1, 2))?;
        let k = x_kernel(&Rational::zero(), &t0)?.mul_scalar(&c);
        report.push(Check::new(
            format!("G3(-1/t0) 1 = sqrt(pi |t0|) K_x for t0 = {t0}"),
            (&g - &k).is_zero(),
            format!("{g}"),
        ));
    }
    for t0 in [r(1, 2), r(2, 1)] {
        let g = apply_group(3, &GroupParam::Lambda(-Rational::one() / &t0), &one)?;
        let k = x_kernel(&Rational::zero(), &t0)?;
        let c = equal_up_to_constant(&g, &k);
        report.push(Check::new(
            format!("G3(-1/t0) 1 has the x-kernel shape for t0 = {t0}"),
            c.is_some(),
            match c {
                Some(c) => format!("squared prefactor ratio {c}"),
                None => format!("{g}"),
            },
        ));
    }
    for t1 in [r(1, 1), r(3, 1)] {
        let g = apply_group(1, &GroupParam::Lambda(-t1.clone()), &one)?;
        let k = p_kernel(&Rational::zero(), &t1)?;
        let c = equal_up_to_constant(&g, &k);
        report.push(Check::new(
            format!("G1(-t1) 1 has the p-kernel shape for t1 = {t1}"),
            c.is_some(),
            match c {
                Some(c) => format!("squared prefactor ratio {c}"),
                None => format!("{g}"),
            },
        ));
    }
    for nbar in [r(0, 1), r(1, 1), r(5, 1)] {
        let gamma = Rational::one() / (r(2, 1) * &nbar + Rational::one());
        let g3 = apply_group(3, &GroupParam::Lambda(gamma.clone()), &one)?;
        let g1 = apply_group(1, &GroupParam::Lambda(gamma.clone()), &one)?;
        let prod = (&g3 * &g1).scale(&(r(2, 1) * &gamma));
        let th = thermal(&nbar)?;
        report.push(Check::new(
            format!("2 gamma G3(gamma) 1 G1(gamma) 1 is the thermal state for nbar = {nbar}"),
            (&prod - &th).is_zero(),
            format!("{th}"),
        ));
    }
    Ok(report)
}

/// `G_3(γ) v_n(2x, t)`.
pub fn transformed_heat_poly(gamma: &Rational, n: u32) -> Result<GaussianExpr> {
    if gamma.is_negative() {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} must be nonnegative"
        )));
    }
    apply_group(
        3,
        &GroupParam::Lambda(gamma.clone()),
        &heat_polynomial(n, true)?,
    )
}

/// Point of a flow: coordinates and `ln σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowState {
    pub lambda: f64,
    pub x: f64,
    pub p: f64,
    pub t: f64,
    pub log_sigma: f64,
}

impl FlowState {
    pub fn start(x: f64, p: f64, t: f64) -> Self {
        FlowState {
            lambda: 0.0,
            x,
            p,
            t,
            log_sigma: 0.0,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.log_sigma.exp()
    }
}

/// Compiled `(∂_t, ∂_x, ∂_p, multiplier)` coefficients of a first-order operator.
pub struct FlowField {
    coeffs: [CompiledScalar; 4],
}

impl FlowField {
    pub fn new(op: &DiffOperator) -> Result<Self> {
        if op.order() > 1 {
            return Err(Error::InvalidParameter(format!("{op} is not first order")));
        }
        let c = |idx| op.coefficient(idx).compile();
        Ok(FlowField {
            coeffs: [c((1, 0, 0)), c((0, 1, 0)), c((0, 0, 1)), c((0, 0, 0))],
        })
    }

    pub fn for_generator(i: usize) -> Result<Self> {
        FlowField::new(&group_generator(i)?)
    }

    /// `(dX, dP, dT, d ln σ)` at a state.
    fn rate(&self, s: &[f64; 4]) -> [f64; 4] {
        let [x, p, t, _] = *s;
        let [a, b, g, m] = &self.coeffs;
        [
            b.eval(x, p, t),
            g.eval(x, p, t),
            a.eval(x, p, t),
            m.eval(x, p, t),
        ]
    }
}

/// Classical fourth-order Runge–Kutta integration of the flow of `B_i` from `λ = 0` to
/// `lambda_target`.
pub fn flow_integrate(
    i: usize,
    lambda_target: f64,
    start: (f64, f64, f64),
    step: f64,
) -> Result<FlowState> {
    let field = FlowField::for_generator(i)?;
    flow_integrate_field(&field, lambda_target, start, step)
}

pub fn flow_integrate_field(
    field: &FlowField,
    lambda_target: f64,
    start: (f64, f64, f64),
    step: f64,
) -> Result<FlowState> {
    flow_trajectory(field, lambda_target, start, step, None)
}

/// Like [`flow_integrate_field`], recording the state every `every` steps.
pub fn flow_trajectory(
    field: &FlowField,
    lambda_target: f64,
    start: (f64, f64, f64),
    step: f64,
    mut record: Option<(&mut Vec<FlowState>, usize)>,
) -> Result<FlowState> {
    if step.is_nan() || step <= 0.0 || !lambda_target.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "step {step} and target {lambda_target} must be positive and finite"
        )));
    }
    let n = (lambda_target.abs() / step).ceil().max(1.0) as usize;
    let h = lambda_target / n as f64;
    let mut s = [start.0, start.1, start.2, 0.0];
    let check = |s: &[f64; 4], l: f64| -> Result<()> {
        if s.iter().any(|v| !v.is_finite()) || s[2] <= 0.0 {
            return Err(Error::SingularFlow(format!(
                "state (x, p, t) = ({}, {}, {}) at lambda = {l}",
                s[0], s[1], s[2]
            )));
        }
        Ok(())
    };
    check(&s, 0.0)?;
    let state = |s: &[f64; 4], l: f64| FlowState {
        lambda: l,
        x: s[0],
        p: s[1],
        t: s[2],
        log_sigma: s[3],
    };
    if let Some((buf, _)) = record.as_mut() {
        buf.push(state(&s, 0.0));
    }
    let add = |a: &[f64; 4], k: &[f64; 4], c: f64| -> [f64; 4] {
        [
            a[0] + c * k[0],
            a[1] + c * k[1],
            a[2] + c * k[2],
            a[3] + c * k[3],
        ]
    };
    for k in 0..n {
        let k1 = field.rate(&s);
        let k2 = field.rate(&add(&s, &k1, h / 2.0));
        let k3 = field.rate(&add(&s, &k2, h / 2.0));
        let k4 = field.rate(&add(&s, &k3, h));
        for j in 0..4 {
            s[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let l = h * (k + 1) as f64;
        check(&s, l)?;
        if let Some((buf, every)) = record.as_mut() {
            if (k + 1) % (*every).max(1) == 0 || k + 1 == n {
                buf.push(state(&s, l));
            }
        }
    }
    Ok(state(&s, lambda_target))
}

/// Closed-form `(X, P, T, ln σ)` of `G_i(λ)` at a point, for real `λ`.
pub fn closed_form_state(i: usize, lambda: f64, (x, p, t): (f64, f64, f64)) -> Result<FlowState> {
    check_index(i)?;
    let l = lambda;
    let (xx, pp, tt, ls) = match i {
        1 => (
            x,
            p * t / (t + l),
            t + l,
            -0.5 * (1.0 + l / t).ln() - l * t * p * p / (t + l),
        ),
        2 => (l.exp() * x, (-l).exp() * p, (2.0 * l).exp() * t, 0.0),
        3 => {
            let d = 1.0 + l * t;
            (x / d, p, t / d, -0.5 * d.ln() - l * x * x / d)
        }
        4 => {
            let (c, s) = (l.cosh(), l.sinh());
            (
                x * c + t * p * s,
                p * c + x / t * s,
                t,
                s * s * (x * x / t + p * p * t) + x * p * (2.0 * l).sinh(),
            )
        }
        5 => (x + l * t, p, t, 2.0 * l * x + l * l * t),
        6 => (x, p + l / t, t, 2.0 * l * p + l * l / t),
        7 => (x + l, p, t, 0.0),
        8 => (x, p + l, t, 0.0),
        _ => (x, p, t, l),
    };
    if tt.is_nan() || tt <= 0.0 || !ls.is_finite() {
        return Err(Error::SingularFlow(format!("G{i}({l}) at ({x}, {p}, {t})")));
    }
    Ok(FlowState {
        lambda: l,
        x: xx,
        p: pp,
        t: tt,
        log_sigma: ls,
    })
}

/// Start points `{-1/2, 0, 1/2}² × {1/2, 1, 2}`.
pub fn start_grid() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::with_capacity(27);
    for x in [-0.5, 0.0, 0.5] {
        for p in [-0.5, 0.0, 0.5] {
            for t in [0.5, 1.0, 2.0] {
                out.push((x, p, t));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowComparison {
    pub index: usize,
    pub lambda: f64,
    pub step: f64,
    pub max_coordinate_error: f64,
    pub max_sigma_error: f64,
    pub worst_start: (f64, f64, f64),
    pub tolerance: f64,
    pub passed: bool,
}

/// Largest deviation of the integrated flow from the closed form over `starts`; the multiplier
/// is compared relative to its size.
pub fn flow_cross_check(
    i: usize,
    lambda: f64,
    step: f64,
    starts: &[(f64, f64, f64)],
    tol: f64,
) -> Result<FlowComparison> {
    let field = FlowField::for_generator(i)?;
    type Point = (f64, f64, f64);
    let errs: Vec<Result<(f64, f64, Point)>> = starts
        .par_iter()
        .map(|&st| {
            let num = flow_integrate_field(&field, lambda, st, step)?;
            let exact = closed_form_state(i, lambda, st)?;
            let ce = (num.x - exact.x)
                .abs()
                .max((num.p - exact.p).abs())
                .max((num.t - exact.t).abs());
            let se = (num.sigma() - exact.sigma()).abs() / exact.sigma().max(1.0);
            Ok((ce, se, st))
        })
        .collect();
    let mut out = FlowComparison {
        index: i,
        lambda,
        step,
        max_coordinate_error: 0.0,
        max_sigma_error: 0.0,
        worst_start: starts.first().copied().unwrap_or_default(),
        tolerance: tol,
        passed: true,
    };
    let mut worst = -1.0;
    for e in errs {
        let (ce, se, st) = e?;
        out.max_coordinate_error = out.max_coordinate_error.max(ce);
        out.max_sigma_error = out.max_sigma_error.max(se);
        if ce.max(se) > worst {
            worst = ce.max(se);
            out.worst_start = st;
        }
    }
    out.passed = out.max_coordinate_error <= tol && out.max_sigma_error <= tol;
    Ok(out)
}

/// `(G_i(h)ψ − G_i(−h)ψ)/(2h)` against `B_i ψ` at `points`, for each step in `steps`.
pub fn infinitesimal_check(
    i: usize,
    psi: &GaussianExpr,
    points: &[(f64, f64, f64)],
    steps: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let f = psi.compile();
    let image = group_generator(i)?.apply(psi).compile();
    let mut out = Vec::new();
    for &h in steps {
        let mut err: f64 = 0.0;
        for &pt in points {
            let val = |l: f64| -> Result<f64> {
                let s = closed_form_state(i, l, pt)?;
                Ok(s.sigma() * f.eval(s.x, s.p, s.t))
            };
            let d = (val(h)? - val(-h)?) / (2.0 * h);
            let exact = image.eval(pt.0, pt.1, pt.2);
            err = err.max((d - exact).abs() / exact.abs().max(1.0));
        }
        out.push((h, err));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use crate::solutions::heat_polynomial_in;

    #[test]
    fn listed_images_of_one() {
        let one = GaussianExpr::one();
        let l = rat(3, 5);
        let g5 = apply_group(5, &GroupParam::Lambda(l.clone()), &one).unwrap();
        let want = GaussianExpr::exp(
            ScalarExpr::x().scale(&(rat(2, 1) * &l)) + ScalarExpr::t().scale(&(&l * &l)),
        )
        .unwrap();
        assert_eq!(g5, want);
        let g = rat(2, 1);
        let g3 = apply_group(3, &GroupParam::Lambda(g.clone()), &one).unwrap();
        // (1+2t)^{-1/2} exp(−x²/(1/2 + t))
        let pre = ScalarExpr::linear_pow(&rat(2, 1), &rat(1, 1), &rat(-1, 2)).unwrap();
        let ex = -(ScalarExpr::x().pow(2)
            * ScalarExpr::linear_pow(&rat(1, 1), &rat(1, 2), &rat(-1, 1)).unwrap());
        assert_eq!(g3, GaussianExpr::term(pre, ex).unwrap());
    }

    #[test]
    fn translation_shifts_argument() {
        let psi = thermal(&rat(1, 1)).unwrap();
        let g7 = apply_group(7, &GroupParam::lambda(1, 3), &psi).unwrap();
        let sub = Substitution::single(
            crate::scalar::Var::X,
            LinearImage::new(
                ScalarExpr::one(),
                ScalarExpr::zero(),
                ScalarExpr::frac(1, 3),
            ),
        );
        assert_eq!(g7, psi.subst(&sub).unwrap());
    }

    #[test]
    fn out_of_family_parameters() {
        assert!(matches!(
            group_action(
                4,
                &GroupParam::Hyperbola {
                    c: rat(1, 1),
                    s: rat(1, 1)
                }
            ),
            Err(Error::SubstitutionOutOfFamily(_))
        ));
        assert!(matches!(
            group_action(2, &GroupParam::Lambda(rat(1, 2))),
            Err(Error::SubstitutionOutOfFamily(_))
        ));
        assert!(matches!(
            group_action(2, &GroupParam::Scale(rat(-1, 2))),
            Err(Error::SubstitutionOutOfFamily(_))
        ));
        assert!(matches!(
            group_action(10, &GroupParam::lambda(0, 1)),
            Err(Error::IndexOutOfRange(10))
        ));
    }

    #[test]
    fn solutions_preserved() {
        let r = solution_preservation_check().unwrap();
        assert_eq!(r.len(), 9 * 3 * 5);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn group_laws() {
        let r = group_law_report().unwrap();
        assert_eq!(r.len(), 27);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(identity_check().unwrap().passed());
    }

    #[test]
    fn conformal_kernels() {
        let r = conformal_kernel_identity().unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn transformed_heat_polynomial_closed_form() {
        let g = rat(1, 1);
        let v = transformed_heat_poly(&g, 2).unwrap();
        assert!(psde_operator().apply(&v).is_zero());
        // v_2(2x/(1+t), t/(1+t)) (1+t)^{-1/2} exp(−x²/(1+t))
        let d = ScalarExpr::linear_pow(&rat(1, 1), &rat(1, 1), &rat(-1, 1)).unwrap();
        let vx = (ScalarExpr::x() * &d).scale(&rat(2, 1));
        let poly = vx.pow(2) + (ScalarExpr::t() * &d).scale(&rat(2, 1));
        let pre = ScalarExpr::linear_pow(&rat(1, 1), &rat(1, 1), &rat(-1, 2)).unwrap();
        let want = GaussianExpr::term(poly * pre, -(ScalarExpr::x().pow(2) * d)).unwrap();
        assert_eq!(v, want);
        let v0 = transformed_heat_poly(&g, 0).unwrap();
        assert_eq!(
            v0,
            apply_group(3, &GroupParam::Lambda(g), &GaussianExpr::one()).unwrap()
        );
        assert!(transformed_heat_poly(&rat(-1, 1), 2).is_err());
        let _ = heat_polynomial_in(2, &rat(2, 1), &ScalarExpr::t());
    }

    #[test]
    fn flows_match_closed_forms() {
        for i in 1..=9 {
            let c = flow_cross_check(i, 1.0, 1e-3, &start_grid(), 1e-8).unwrap();
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn pseudo_rotation_flow() {
        let s = flow_integrate(4, 1.0, (0.5, -0.5, 2.0), 1e-3).unwrap();
        let (c, sh) = (1f64.cosh(), 1f64.sinh());
        assert!((s.x - (0.5 * c + 2.0 * -0.5 * sh)).abs() < 1e-8);
        let sigma = (sh * sh * (0.25 / 2.0 + 0.25 * 2.0) + 0.5 * -0.5 * (2f64).sinh()).exp();
        assert!((s.sigma() - sigma).abs() < 1e-8);
        let s9 = flow_integrate(9, 1.0, (0.5, -0.5, 2.0), 1e-3).unwrap();
        assert!((s9.sigma() - 1f64.exp()).abs() < 1e-12);
        assert_eq!((s9.x, s9.p, s9.t), (0.5, -0.5, 2.0));
    }

    #[test]
    fn singular_flow_detected() {
        // T = t + λ reaches 0
        assert!(matches!(
            flow_integrate(1, -2.0, (0.0, 0.0, 1.0), 1e-3),
            Err(Error::SingularFlow(_))
        ));
    }

    #[test]
    fn derivative_at_identity() {
        let sols = test_solutions().unwrap();
        let pts = [(0.3, -0.2, 0.7), (-0.5, 0.4, 1.5)];
        for i in 1..=9 {
            for (_, psi) in &sols {
                let e = infinitesimal_check(i, psi, &pts, &[1e-2, 5e-3]).unwrap();
                assert!(e[1].1 < 1e-3, "G{i}: {e:?}");
                assert!(e[1].1 <= e[0].1 / 3.0 || e[1].1 < 1e-9, "G{i}: {e:?}");
            }
        }
    }
}
