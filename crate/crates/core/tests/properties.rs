use proptest::prelude::*;

use psde_core::scalar::{LinearImage, Substitution, TMap};
use psde_core::symmetry::{classify_b, power_form, t_pow_l};
use psde_core::{psde_operator, rat, DiffOperator, GaussianExpr, ScalarExpr, Var};

fn factor(k: u8) -> ScalarExpr {
    let h = rat(1, 2);
    match k % 6 {
        0 => ScalarExpr::one(),
        1 => ScalarExpr::linear_pow(&rat(1, 1), &rat(1, 1), &rat(-1, 1)).unwrap(),
        2 => ScalarExpr::linear_pow(&rat(1, 1), &rat(2, 1), &rat(-2, 1)).unwrap(),
        3 => ScalarExpr::t_pow(&h).unwrap(),
        4 => ScalarExpr::linear_pow(&rat(1, 1), &rat(1, 1), &h).unwrap(),
        _ => ScalarExpr::t().pow_int(-1).unwrap(),
    }
}

fn scalar() -> impl Strategy<Value = ScalarExpr> {
    prop::collection::vec(
        (
            -6i64..=6,
            1i64..=4,
            0u32..=2,
            0u32..=2,
            0u32..=2,
            any::<u8>(),
        ),
        1..=3,
    )
    .prop_map(|terms| {
        terms
            .into_iter()
            .fold(ScalarExpr::zero(), |acc, (n, d, i, j, k, f)| {
                acc + ScalarExpr::monomial(rat(n, d), i, j, k) * factor(f)
            })
    })
}

fn rational_scalar() -> impl Strategy<Value = ScalarExpr> {
    prop::collection::vec(
        (-4i64..=4, 1i64..=3, 0u32..=1, 0u32..=1, 0u32..=1, 0u8..=2),
        1..=2,
    )
    .prop_map(|terms| {
        terms
            .into_iter()
            .fold(ScalarExpr::zero(), |acc, (n, d, i, j, k, f)| {
                acc + ScalarExpr::monomial(rat(n, d), i, j, k) * factor(f)
            })
    })
}

fn operator() -> impl Strategy<Value = DiffOperator> {
    prop::collection::vec((rational_scalar(), 0u32..=1, 0u32..=1, 0u32..=1), 1..=3).prop_map(
        |terms| {
            terms
                .into_iter()
                .fold(DiffOperator::zero(), |acc, (c, a, b, d)| {
                    acc.add(&DiffOperator::monomial(c, (a, b, d)))
                })
        },
    )
}

fn gaussian() -> impl Strategy<Value = GaussianExpr> {
    (rational_scalar(), -2i64..=2, 1i64..=3).prop_map(|(pre, n, d)| {
        let arg = -(ScalarExpr::x().pow(2) + ScalarExpr::p().pow(2)).scale(&rat(1, 4))
            + (ScalarExpr::x() * ScalarExpr::p()).scale(&rat(n, d));
        GaussianExpr::term(pre, arg).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &ScalarExpr::one(), a.clone());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn derivation_law(a in scalar(), b in scalar()) {
        for v in [Var::X, Var::P, Var::T] {
            prop_assert_eq!((&a * &b).diff(v), &a.diff(v) * &b + &a * &b.diff(v));
        }
    }

    #[test]
    fn canonical_form_round_trips(a in scalar()) {
        let parsed: ScalarExpr = a.to_string().parse().unwrap();
        prop_assert_eq!(&parsed, &a);
        prop_assert_eq!(parsed.to_string(), a.to_string());
    }

    #[test]
    fn substitution_is_a_ring_map(a in scalar(), b in scalar(), l in 1i64..=3) {
        let lam = rat(l, 2);
        let r = ScalarExpr::t() * ScalarExpr::linear_pow(&rat(1, 1), &lam, &rat(-1, 1)).unwrap();
        let sub = Substitution::identity()
            .with_x(LinearImage::new(ScalarExpr::one(), ScalarExpr::zero(), ScalarExpr::t().scale(&lam)))
            .with_p(LinearImage::new(ScalarExpr::zero(), r, ScalarExpr::zero()))
            .with_t(TMap::Shift(lam));
        let s = |e: &ScalarExpr| sub.apply(e).unwrap();
        prop_assert_eq!(s(&(&a * &b)), &s(&a) * &s(&b));
        prop_assert_eq!(s(&(&a + &b)), &s(&a) + &s(&b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(a in operator(), b in operator(), c in operator()) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn jacobi_identity(a in operator(), b in operator(), c in operator()) {
        let j = a.commutator(&b.commutator(&c))
            .add(&b.commutator(&c.commutator(&a)))
            .add(&c.commutator(&a.commutator(&b)));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn apply_respects_composition(a in operator(), b in operator(), psi in gaussian()) {
        prop_assert_eq!(a.compose(&b).apply(&psi), a.apply(&b.apply(&psi)));
    }

    #[test]
    fn scaling_time_preserves_class(kind in 0u8..4, n in 1i64..=5, d in 1i64..=3, s in 1i64..=4) {
        let c = rat(n, d);
        let b = match kind {
            0 => ScalarExpr::constant(c.clone()),
            1 => ScalarExpr::linear_pow(&c, &rat(1, 1), &rat(-2, 1)).unwrap(),
            2 => power_form(&c, &rat(n, 1)).unwrap(),
            _ => ScalarExpr::t().pow(2) + ScalarExpr::constant(c.clone()),
        };
        let sub = Substitution::identity().with_t(TMap::Scale(rat(s, 2)));
        let scaled = sub.apply(&b).unwrap();
        let c0 = classify_b(&b).unwrap();
        let c1 = classify_b(&scaled).unwrap();
        prop_assert_eq!(c0.class, c1.class);
        prop_assert_eq!(c0.dimension, c1.dimension);
    }
}

#[test]
fn commutator_with_powers_of_t() {
    let l = psde_operator();
    for n in -2i64..=3 {
        let tn = DiffOperator::scalar(ScalarExpr::t().pow_int(n).unwrap());
        let lhs = l.commutator(&tn);
        let rhs = DiffOperator::scalar(ScalarExpr::t().pow_int(n - 1).unwrap().scale(&rat(n, 1)));
        assert_eq!(lhs, rhs, "n = {n}");
        assert_eq!(
            l.commutator(&t_pow_l(n)),
            t_pow_l(n - 1).scale(&rat(n, 1)),
            "n = {n}"
        );
    }
}
