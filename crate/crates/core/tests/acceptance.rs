//! End-to-end acceptance criteria. Each criterion prints one `PASS`/`FAIL` line to stderr; the
//! test fails if any criterion fails.

use std::io::Write;
use std::time::Instant;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use psde_core::flows::{
    flow_cross_check, group_law_report, solution_preservation_check, start_grid,
};
use psde_core::numeric::{delta_limit_test, integral_invariance, thermal_mass, TestFunction};
use psde_core::solutions::{
    a5_power_on_one, generalized_hermite, heat_polynomial, hermite, kernel, lift_standard,
    operator_power_on_one, p_backward_operator, p_kernel, raising_operator_power, thermal,
    x_kernel, KernelKind, KernelParams, LiftTarget, SeriesFamily, SCALE_RELATION,
};
use psde_core::symmetry::{
    a_basis, basis_names, check_determining_equations, check_symmetry, classify_b,
    commutator_table, contraction_in_a_basis, general_symmetry_family, make_generator_a,
    make_generator_x, power_form, so31_contraction, table_from_relations, virasoro_check, BClass,
    A_RELATIONS,
};
use psde_core::{psde_operator, rat, DiffOperator, GaussianExpr, Rational, ScalarExpr, Var};

const SEED: u64 = 20_240_917;

struct Outcome {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn report(out: &mut Vec<Outcome>, id: usize, name: &'static str, passed: bool, detail: String) {
    let line = format!(
        "[{}] criterion {id:>2} {name}: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(std::io::stderr(), "{line}");
    out.push(Outcome {
        id,
        name,
        passed,
        detail,
    });
}

fn g(s: &str) -> GaussianExpr {
    s.parse().unwrap()
}

fn commutator_table_matches(out: &mut Vec<Outcome>) {
    let start = Instant::now();
    let tab = commutator_table(&a_basis(), basis_names("A", 9)).unwrap();
    let expected = table_from_relations(basis_names("A", 9), A_RELATIONS);
    let diffs = tab.differences(&expected);
    let secs = start.elapsed().as_secs_f64();
    let nonzero = (0..9)
        .flat_map(|i| (i + 1..9).map(move |j| (i, j)))
        .filter(|&(i, j)| tab.entry_string(i, j) != "0")
        .count();
    report(
        out,
        1,
        "commutator table",
        diffs.is_empty() && !tab.has_central() && secs < 5.0,
        format!(
            "{} of 81 entries differ from the reference; all 36 pairs i < j checked, {nonzero} nonzero; {secs:.2}s (limit 5s)",
            diffs.len()
        ),
    );
}

fn symmetry_criterion(out: &mut Vec<Outcome>) {
    let l = psde_operator();
    let mut bad = Vec::new();
    for i in 1..=9 {
        let want = match i {
            2 => ScalarExpr::int(2),
            3 => ScalarExpr::t().scale(&rat(2, 1)),
            _ => ScalarExpr::zero(),
        };
        let got = check_symmetry(&l, &make_generator_a(i).unwrap());
        if got.as_ref() != Some(&want) {
            bad.push(format!("A{i}: {got:?}"));
        }
    }
    report(
        out,
        2,
        "symmetry criterion",
        bad.is_empty(),
        if bad.is_empty() {
            "xi = 0 except xi(A2) = 2, xi(A3) = 2t".into()
        } else {
            bad.join("; ")
        },
    );
}

fn determining_equations(out: &mut Vec<Outcome>) {
    let mut failures = 0;
    let mut checks = 0;
    for i in 1..=9 {
        let r = check_determining_equations(&make_generator_x(i).unwrap());
        checks += r.len();
        failures += r.failures().count();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..5 {
        let c: [Rational; 9] =
            std::array::from_fn(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=9)));
        let r = check_determining_equations(&general_symmetry_family(&c));
        checks += r.len();
        failures += r.failures().count();
    }
    report(
        out,
        3,
        "determining equations",
        failures == 0,
        format!("{checks} residual checks over X1..X9 and 5 random families (seed {SEED}), {failures} nonzero"),
    );
}

fn group_actions(out: &mut Vec<Outcome>) {
    let pres = solution_preservation_check().unwrap();
    let law = group_law_report().unwrap();
    report(
        out,
        4,
        "group actions",
        pres.passed() && law.passed() && pres.len() == 9 * 3 * 5 && law.len() == 27,
        format!(
            "{}/{} images of 5 solutions have zero residual, {}/{} group-law pairs exact",
            pres.len() - pres.failures().count(),
            pres.len(),
            law.len() - law.failures().count(),
            law.len()
        ),
    );
}

fn flow_cross_check_all(out: &mut Vec<Outcome>) {
    let start = Instant::now();
    let grid = start_grid();
    let mut worst: f64 = 0.0;
    let mut ok = grid.len() == 27;
    for i in 1..=9 {
        let c = flow_cross_check(i, 1.0, 1e-3, &grid, 1e-8).unwrap();
        worst = worst.max(c.max_coordinate_error).max(c.max_sigma_error);
        ok &= c.passed;
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        out,
        5,
        "flow cross-check",
        ok && secs < 10.0,
        format!("max deviation {worst:.2e} (tol 1e-8) over 9 generators x 27 starts, {secs:.2}s (limit 10s)"),
    );
}

/// `v_{n+1}(X, s) = X v_n + 2 n s v_{n-1}`
fn recurrence(n: u32, xx: &ScalarExpr, s: &ScalarExpr) -> ScalarExpr {
    let mut prev = ScalarExpr::zero();
    let mut cur = ScalarExpr::one();
    for k in 0..n {
        let next = xx * &cur + (s * &prev).scale(&rat(2 * k as i64, 1));
        prev = cur;
        cur = next;
    }
    cur
}

fn polynomial_families(out: &mut Vec<Outcome>) {
    let x = ScalarExpr::x();
    let t = ScalarExpr::t();
    let mut bad = Vec::new();
    let ab = [
        (rat(3, 2), rat(2, 3)),
        (rat(2, 1), rat(1, 1)),
        (rat(-1, 3), rat(5, 4)),
    ];
    for n in 0..=12 {
        if heat_polynomial(n, true).unwrap()
            != GaussianExpr::scalar(recurrence(n, &x.scale(&rat(2, 1)), &t))
        {
            bad.push(format!("v_{n}(2x,t)"));
        }
        if hermite(n).unwrap()
            != GaussianExpr::scalar(recurrence(n, &x.scale(&rat(2, 1)), &ScalarExpr::int(-1)))
        {
            bad.push(format!("H_{n}"));
        }
        for (a, b) in &ab {
            let want = recurrence(n, &x.scale(a), &ScalarExpr::constant(-b.clone()));
            if generalized_hermite(n, a, b).unwrap() != GaussianExpr::scalar(want) {
                bad.push(format!("GHP_{n}({a},{b})"));
            }
        }
    }
    let listed_v = ["1", "2*x", "4*x^2 + 2*t", "8*x^3 + 12*x*t"];
    for (n, s) in listed_v.iter().enumerate() {
        if heat_polynomial(n as u32, true).unwrap() != g(s) {
            bad.push(format!("listed v_{n}"));
        }
    }
    let listed_h = ["1", "2*x", "4*x^2 - 2", "8*x^3 - 12*x"];
    for (n, s) in listed_h.iter().enumerate() {
        if hermite(n as u32).unwrap() != g(s) {
            bad.push(format!("listed H_{n}"));
        }
    }
    for (a, b) in &ab {
        let ax = x.scale(a);
        let bb = ScalarExpr::constant(b.clone());
        let listed = [
            ScalarExpr::one(),
            ax.clone(),
            ax.pow(2) - bb.scale(&rat(2, 1)),
            ax.pow(3) - (&ax * &bb).scale(&rat(6, 1)),
            ax.pow(4) - (ax.pow(2) * &bb).scale(&rat(12, 1)) + bb.pow(2).scale(&rat(12, 1)),
            ax.pow(5) - (ax.pow(3) * &bb).scale(&rat(20, 1)) + (&ax * bb.pow(2)).scale(&rat(60, 1)),
        ];
        for (n, want) in listed.iter().enumerate() {
            if generalized_hermite(n as u32, a, b).unwrap() != GaussianExpr::scalar(want.clone()) {
                bad.push(format!("listed GHP_{n}({a},{b})"));
            }
        }
    }
    let herm_op = DiffOperator::scalar(x.scale(&rat(2, 1))).sub(&DiffOperator::partial(Var::X));
    for n in 0..=20 {
        if GaussianExpr::scalar(a5_power_on_one(n)) != heat_polynomial(n, true).unwrap() {
            bad.push(format!("A5^{n} 1"));
        }
        if GaussianExpr::scalar(operator_power_on_one(&herm_op, n)) != hermite(n).unwrap() {
            bad.push(format!("(2x - d/dx)^{n} 1"));
        }
        for (a, b) in &ab {
            let op = SeriesFamily::Ghp {
                alpha: a.clone(),
                beta: b.clone(),
            }
            .operator()
            .unwrap();
            if GaussianExpr::scalar(operator_power_on_one(&op, n))
                != generalized_hermite(n, a, b).unwrap()
            {
                bad.push(format!("GHP operator power {n} ({a},{b})"));
            }
            let literal = recurrence(n, &x.scale(a), &ScalarExpr::constant(-(a * b) / rat(2, 1)));
            if raising_operator_power(n, a, b).unwrap() != GaussianExpr::scalar(literal) {
                bad.push(format!("(ax - b d/dx)^{n} 1 ({a},{b})"));
            }
        }
    }
    report(
        out,
        6,
        "polynomial families",
        bad.is_empty(),
        if bad.is_empty() {
            "closed sums and listed values for n <= 12, operator powers for n <= 20".into()
        } else {
            format!("mismatches: {}", bad.join(", "))
        },
    );
}

fn kernels(out: &mut Vec<Outcome>) {
    let l = psde_operator();
    let mut bad = Vec::new();
    for (x0, t0) in [(rat(0, 1), rat(0, 1)), (rat(1, 2), rat(-1, 1))] {
        if !l.apply(&x_kernel(&x0, &t0).unwrap()).is_zero() {
            bad.push(format!("K_x({x0},{t0})"));
        }
    }
    for (p0, t1) in [(rat(0, 1), rat(1, 1)), (rat(-1, 3), rat(5, 2))] {
        let k = p_kernel(&p0, &t1).unwrap();
        if !p_backward_operator().apply(&k).is_zero() || !l.apply(&k).is_zero() {
            bad.push(format!("K_p({p0},{t1})"));
        }
    }
    for (t0, t1) in [
        (rat(0, 1), rat(1, 1)),
        (rat(-1, 1), rat(2, 1)),
        (rat(1, 2), rat(3, 1)),
    ] {
        let params = KernelParams {
            x0: rat(1, 3),
            t0: t0.clone(),
            p0: rat(-1, 2),
            t1: t1.clone(),
        };
        if !l
            .apply(&kernel(KernelKind::TwoSided, &params).unwrap())
            .is_zero()
        {
            bad.push(format!("two-sided ({t0},{t1})"));
        }
    }
    let eps = [1e-1, 1e-2, 1e-3];
    let mut reductions = Vec::new();
    for kind in [KernelKind::XSide, KernelKind::PSide] {
        for phi in TestFunction::LIBRARY {
            let tab = delta_limit_test(kind, phi, &rat(0, 1), &eps).unwrap();
            if !tab.first_order(2.0, 1e-13) {
                bad.push(format!("delta {kind:?} {}", phi.name()));
            }
            reductions.extend(tab.rows.iter().filter_map(|r| r.reduction));
        }
    }
    let lo = reductions.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = reductions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report(
        out,
        7,
        "kernels",
        bad.is_empty(),
        format!(
            "residuals zero for K_x, K_p and 3 two-sided windows; delta-error reductions per decade in [{lo:.2}, {hi:.2}]{}",
            if bad.is_empty() { String::new() } else { format!("; failures: {}", bad.join(", ")) }
        ),
    );
}

fn thermal_distributions(out: &mut Vec<Outcome>) {
    let l = psde_operator();
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for n in [rat(0, 1), rat(1, 1), rat(5, 1)] {
        let q = thermal(&n).unwrap();
        if !l.apply(&q).is_zero() {
            bad.push(format!("residual nbar={n}"));
        }
        // 1/(n̄+1) exp(−(x²+p²)/(2n̄+2))
        let c = Rational::one() / (&n + Rational::one());
        let want = GaussianExpr::term(
            ScalarExpr::constant(c.clone()),
            -(ScalarExpr::x().pow(2) + ScalarExpr::p().pow(2)).scale(&(c / rat(2, 1))),
        )
        .unwrap();
        if q.at_t(&Rational::one()).unwrap() != want {
            bad.push(format!("t=1 reduction nbar={n}"));
        }
        let m = thermal_mass(&n, 1.0).unwrap();
        worst = worst.max((m - 2.0 * std::f64::consts::PI).abs());
    }
    report(
        out,
        8,
        "thermal distributions",
        bad.is_empty() && worst <= 1e-10,
        format!(
            "residuals and t=1 reductions exact for nbar in {{0,1,5}}, |mass - 2pi| <= {worst:.2e} (tol 1e-10){}",
            if bad.is_empty() { String::new() } else { format!("; failures: {}", bad.join(", ")) }
        ),
    );
}

fn invariance(out: &mut Vec<Outcome>) {
    let ts = [rat(1, 4), rat(1, 1), rat(4, 1)];
    let mut ok = true;
    let mut parts = Vec::new();
    for gamma in [rat(1, 2), rat(1, 1)] {
        let tab = integral_invariance(&gamma, &ts, 1e-10).unwrap();
        ok &= tab.equals_target && tab.independent_of_t;
        parts.push(format!(
            "gamma={gamma}: integrals {:.12} (sqrt(pi) = {:.12}, sqrt(pi/gamma) = {:.12}), spread over t {:.1e}",
            tab.rows[0].x_integral, tab.target, tab.closed_form, tab.spread
        ));
    }
    report(out, 9, "integral invariance", ok, parts.join("; "));
}

fn virasoro(out: &mut Vec<Outcome>) {
    let r = virasoro_check(-4..=4);
    report(
        out,
        10,
        "Virasoro relations",
        r.passed(),
        format!(
            "{}/{} relations exact for -4 <= m, n <= 4 (t^m L families for the same range)",
            r.len() - r.failures().count(),
            r.len()
        ),
    );
}

fn contraction(out: &mut Vec<Outcome>) {
    let c = so31_contraction().unwrap();
    let n = c.dim();
    let mut negative = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if c.structure(i, j, k).min_power().is_some_and(|p| p < 0) {
                    negative += 1;
                }
            }
        }
    }
    let lim = c.limit().unwrap();
    let a = commutator_table(&a_basis(), basis_names("A", 9)).unwrap();
    let sub = a
        .change_basis(&contraction_in_a_basis(), lim.names().to_vec())
        .unwrap();
    let diffs = sub.differences(&lim);
    report(
        out,
        11,
        "contraction",
        negative == 0 && diffs.is_empty() && c.jacobi_violations().is_empty(),
        format!(
            "{negative} structure constants with negative powers of g; g -> 0 table differs from span(A4, A5, A7, A8, A6, 2 A9) in {} entries",
            diffs.len()
        ),
    );
}

fn classification(out: &mut Vec<Outcome>) {
    let mut bad = Vec::new();
    let lin =
        |b1: i64, b0: i64| ScalarExpr::linear_pow(&rat(b1, 1), &rat(b0, 1), &rat(-2, 1)).unwrap();
    let reducible = [
        ("1", ScalarExpr::one()),
        ("3/2", ScalarExpr::frac(3, 2)),
        ("(t+1)^-2", lin(1, 1)),
        ("(2t+3)^-2", lin(2, 3)),
        ("(-3t+1)^-2", lin(-3, 1)),
    ];
    for (name, b) in &reducible {
        let c = classify_b(b).unwrap();
        if c.class != BClass::StandardReducible
            || !c.maximal
            || c.k.is_none()
            || !c.verification.passed()
        {
            bad.push(format!("b = {name}: {:?}", c.class));
        }
    }
    for alpha in [1, 3, 5] {
        let b = power_form(&rat(2, 1), &rat(alpha, 1)).unwrap();
        let c = classify_b(&b).unwrap();
        if c.class != BClass::PowerLaw
            || c.dimension != 6
            || c.generators.len() != 6
            || !c.verification.passed()
        {
            bad.push(format!("b = 2 t^{alpha}: {:?}", c.class));
        }
    }
    let b = ScalarExpr::t().pow(2) + ScalarExpr::one();
    let c = classify_b(&b).unwrap();
    if c.class != BClass::Generic
        || c.dimension != 5
        || c.generators.len() != 5
        || !c.verification.passed()
    {
        bad.push(format!("b = t^2+1: {:?}", c.class));
    }
    report(
        out,
        12,
        "classification",
        bad.is_empty(),
        if bad.is_empty() {
            "5 standard-reducible (form conditions zero), 3 power laws with X6 verified, t^2+1 generic with 5 fields verified".into()
        } else {
            bad.join("; ")
        },
    );
}

fn point_transformation(out: &mut Vec<Outcome>) {
    let sols = [
        "1",
        "x*p",
        "x^2 + 2*t",
        "p^2 - 2*t",
        "t^-1/2*exp(-1/4*t^-1*x^2)",
    ];
    let mut bad = Vec::new();
    for s in sols {
        let lift = lift_standard(&g(s)).unwrap();
        if lift.matched != LiftTarget::Unscaled
            || !lift.unscaled_residual.is_zero()
            || !lift.rescaled_psde_residual.is_zero()
        {
            bad.push(s);
        }
    }
    report(
        out,
        13,
        "point transformation",
        bad.is_empty(),
        format!(
            "{}/5 lifts annihilated by d/dt - d2/dx2 + t^-2 d2/dp2; scale relation: {SCALE_RELATION}",
            5 - bad.len()
        ),
    );
}

#[test]
fn acceptance_criteria() {
    let start = Instant::now();
    let mut out = Vec::new();
    commutator_table_matches(&mut out);
    symmetry_criterion(&mut out);
    determining_equations(&mut out);
    group_actions(&mut out);
    flow_cross_check_all(&mut out);
    polynomial_families(&mut out);
    kernels(&mut out);
    thermal_distributions(&mut out);
    invariance(&mut out);
    virasoro(&mut out);
    contraction(&mut out);
    classification(&mut out);
    point_transformation(&mut out);
    let secs = start.elapsed().as_secs_f64();
    let _ = writeln!(
        std::io::stderr(),
        "acceptance: {}/{} criteria pass in {secs:.1}s",
        out.iter().filter(|o| o.passed).count(),
        out.len()
    );
    let failed: Vec<String> = out
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{} {} ({})", o.id, o.name, o.detail))
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:#?}");
}
