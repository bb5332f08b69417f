//! Symmetry criterion `[L, A] = ξ L` and the determining equations of the pseudo-diffusion
//! operator.

use crate::check::{Check, CheckReport};
use crate::operator::DiffOperator;
use crate::scalar::{ScalarExpr, Var};
use crate::Rational;

use super::generators::VectorField;

/// The multiplier `ξ` with `[l, a] = ξ·l`, or `None` when `[l, a]` is not a multiple of `l`.
///
/// `ξ` is read off from the leading coefficient of `l` and then confirmed on every term.
pub fn check_symmetry(l: &DiffOperator, a: &DiffOperator) -> Option<ScalarExpr> {
    let c = l.commutator(a);
    if c.is_zero() {
        return Some(ScalarExpr::zero());
    }
    let (idx, lead) = l
        .terms()
        .filter(|(_, s)| s.try_inverse().is_ok())
        .max_by_key(|(i, _)| **i)?;
    let xi = c.coefficient(*idx) * lead.try_inverse().ok()?;
    if c.sub(&l.mul_scalar(&xi)).is_zero() {
        Some(xi)
    } else {
        None
    }
}

/// The six determining-equation residuals for `α ∂_t + β ∂_x + γ ∂_p + η u ∂_u`.
pub fn determining_residuals(v: &VectorField) -> [(&'static str, ScalarExpr); 6] {
    let t = ScalarExpr::t;
    let t2 = t().pow(2);
    let d = |e: &ScalarExpr, vars: &[Var]| vars.iter().fold(e.clone(), |acc, v| acc.diff(*v));
    let (a, b, g, h) = (&v.alpha, &v.beta, &v.gamma, &v.eta);
    let two = ScalarExpr::int(2);
    let four = ScalarExpr::int(4);
    [
        (
            "t^2*gamma_x - beta_p",
            &t2 * d(g, &[Var::X]) - d(b, &[Var::P]),
        ),
        (
            "t*(beta_x - gamma_p) - alpha",
            t() * (d(b, &[Var::X]) - d(g, &[Var::P])) - a,
        ),
        (
            "t^2*gamma_xx - gamma_pp - 4*t^2*gamma_t + 2*eta_p",
            &t2 * d(g, &[Var::X, Var::X]) - d(g, &[Var::P, Var::P]) - &four * &t2 * d(g, &[Var::T])
                + &two * d(h, &[Var::P]),
        ),
        (
            "t^2*beta_xx - beta_pp - 2*t^2*eta_x - 4*t^2*beta_t",
            &t2 * d(b, &[Var::X, Var::X])
                - d(b, &[Var::P, Var::P])
                - &two * &t2 * d(h, &[Var::X])
                - &four * &t2 * d(b, &[Var::T]),
        ),
        (
            "2*beta_x - alpha_t",
            &two * d(b, &[Var::X]) - d(a, &[Var::T]),
        ),
        (
            "eta_pp - t^2*eta_xx + 4*t^2*eta_t",
            d(h, &[Var::P, Var::P]) - &t2 * d(h, &[Var::X, Var::X]) + &four * &t2 * d(h, &[Var::T]),
        ),
    ]
}

/// One check per determining equation, plus the requirement that `α` depend on `t` only.
pub fn check_determining_equations(v: &VectorField) -> CheckReport {
    let mut report = CheckReport::default();
    for (n, (name, r)) in determining_residuals(v).into_iter().enumerate() {
        report.push(Check::new(
            format!("determining equation {}: {name} = 0", n + 1),
            r.is_zero(),
            format!("residual {r}"),
        ));
    }
    report.push(Check::new(
        "alpha depends on t only",
        v.alpha.is_t_only(),
        format!("alpha = {}", v.alpha),
    ));
    report
}

/// The nine-parameter solution of the determining equations.
///
/// In operator form it is `Σ c_i A_i`; as a vector field it equals `Σ c_i s_i X_i` with the
/// sign vector [`super::SIGNS`].
pub fn general_symmetry_family(c: &[Rational; 9]) -> VectorField {
    let k = |i: usize| ScalarExpr::constant(c[i - 1].clone());
    let e = |s: &str| s.parse::<ScalarExpr>().expect("family term");
    let alpha = k(3) * e("t^2") + k(2) * e("2*t") + k(1);
    let beta = (k(3) * e("t") + k(2)) * e("x") + k(4) * e("t*p") + k(5) * e("t") + k(7);
    let gamma = -(k(2) + k(1) * e("t^-1")) * e("p") + k(4) * e("x*t^-1") + k(6) * e("t^-1") + k(8);
    let eta_op = k(3) * e("x^2 + 1/2*t") - k(1) * e("p^2 + 1/2*t^-1")
        + k(4) * e("2*x*p")
        + k(5) * e("2*x")
        + k(6) * e("2*p")
        + k(9);
    VectorField::new(alpha, beta, gamma, -eta_op)
}

#[cfg(test)]
mod tests {
    use super::super::generators::{a_basis, make_generator_x, SIGNS};
    use super::*;
    use crate::psde_operator;

    #[test]
    fn multipliers() {
        let l = psde_operator();
        let xi: Vec<ScalarExpr> = a_basis()
            .iter()
            .map(|a| check_symmetry(&l, a).expect("symmetry"))
            .collect();
        for (i, x) in xi.iter().enumerate() {
            match i + 1 {
                2 => assert_eq!(*x, ScalarExpr::int(2)),
                3 => assert_eq!(*x, ScalarExpr::int(2) * ScalarExpr::t()),
                _ => assert!(x.is_zero()),
            }
        }
        let not_sym: DiffOperator = "x*Dx".parse().unwrap();
        assert_eq!(check_symmetry(&l, &not_sym), None);
    }

    #[test]
    fn determining_equations() {
        for i in 1..=9 {
            assert!(check_determining_equations(&make_generator_x(i).unwrap()).passed());
        }
        let bad = VectorField::new(
            ScalarExpr::zero(),
            ScalarExpr::p(),
            ScalarExpr::zero(),
            ScalarExpr::zero(),
        );
        let r = check_determining_equations(&bad);
        assert!(!r.checks[0].passed);
        assert_eq!(determining_residuals(&bad)[0].1, ScalarExpr::int(-1));
    }

    #[test]
    fn family_matches_basis() {
        let ones: [Rational; 9] = std::array::from_fn(|_| Rational::from_integer(1.into()));
        let fam = general_symmetry_family(&ones);
        assert!(check_determining_equations(&fam).passed());
        let mut sum = VectorField::zero();
        for i in 1..=9 {
            sum = sum.add(
                &make_generator_x(i)
                    .unwrap()
                    .scale(&Rational::from_integer(SIGNS[i - 1].into())),
            );
        }
        assert_eq!(fam, sum);
        for i in 1..=9 {
            let c: [Rational; 9] =
                std::array::from_fn(|k| Rational::from_integer(((k + 1 == i) as i64).into()));
            let x = make_generator_x(i)
                .unwrap()
                .scale(&Rational::from_integer(SIGNS[i - 1].into()));
            assert_eq!(general_symmetry_family(&c), x);
        }
    }
}
