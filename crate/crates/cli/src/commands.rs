use std::fmt;
use std::path::Path;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use psde_core::flows::{
    apply_group, closed_form_state, flow_trajectory, group_action, test_solutions,
    transformed_heat_poly, FlowField, GroupParam,
};
use psde_core::numeric::{delta_limit_test, integral_invariance, TestFunction};
use psde_core::scalar::{BigReal, Real};
use psde_core::solutions::{
    a5_power_on_one, dual, generalized_hermite, heat_polynomial, hermite, kernel, lift_standard,
    psde_residual, raising_operator_power, thermal, KernelKind, KernelParams, LiftTarget,
    SCALE_RELATION,
};
use psde_core::symmetry::{
    a_basis, analyze_structure, basis_names, check_determining_equations, check_symmetry,
    classify_b, commutator_table, contraction_in_a_basis, exchange_involution,
    general_symmetry_family, make_generator_a, make_generator_x, so31_contraction,
    table_from_relations, vector_field_table, virasoro_check, x_basis, LieAlgebraTable,
    A_RELATIONS, SIGNS,
};
use psde_core::{psde_operator, rat, CheckReport, Error, GaussianExpr, Rational, ScalarExpr};

use crate::report::{to_value, Report, Table};
use crate::{
    ApplyArgs, Basis, Cli, Command, DeltaArgs, FlowArgs, Grid, InvarianceArgs, Phi, SampleArgs,
    Side, SolutionKind, TableArgs, VerifyKind,
};

pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidParameter(_)
            | Error::InvalidWindow { .. }
            | Error::SubstitutionOutOfFamily(_)
            | Error::IndexOutOfRange(_)
            | Error::InvalidCoefficient(_)
            | Error::SingularFlow(_)
            | Error::Parse { .. }
            | Error::DegenerateMetric
            | Error::NegativeBaseFractionalPower(_)
            | Error::PreconditionViolated(_) => Failure::Usage(msg),
            _ => Failure::Runtime(msg),
        }
    }
}

fn usage(msg: impl fmt::Display) -> Failure {
    Failure::Usage(msg.to_string())
}

type Outcome = Result<Report, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let mut report = match &cli.command {
        Command::Table(a) => table(a, cli.seed)?,
        Command::Verify { kind } => verify(kind, cli.seed)?,
        Command::Solution { kind } => solution(kind, cli)?,
        Command::ApplyGroup(a) => apply(a, cli.seed)?,
        Command::ClassifyB { b } => classify(b, cli.seed)?,
        Command::Flow(a) => flow(a, cli.seed)?,
        Command::DeltaTest(a) => delta(a, cli.seed)?,
        Command::Invariance(a) => invariance(a, cli.seed)?,
    };
    if let Some(p) = cli.precision {
        report = report.input("precision", p);
    }
    Ok(report)
}

fn push_checks(report: &mut Report, checks: &CheckReport) {
    for c in &checks.checks {
        report.line(format!(
            "  [{}] {}: {}",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
}

fn check_summary(checks: &CheckReport) -> Value {
    json!({
        "total": checks.len(),
        "failed": checks.failures().count(),
        "checks": to_value(checks),
    })
}

fn table_mismatches(got: &LieAlgebraTable, want: &LieAlgebraTable) -> Vec<String> {
    got.differences(want)
        .into_iter()
        .map(|(i, j)| {
            format!(
                "[{}, {}]: computed {}, expected {}",
                got.names()[i],
                got.names()[j],
                got.entry_string(i, j),
                want.entry_string(i, j)
            )
        })
        .collect()
}

fn nonzero_brackets(tab: &LieAlgebraTable) -> usize {
    let n = tab.dim();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| tab.entry_string(i, j) != "0")
        .count()
}

fn table(a: &TableArgs, seed: u64) -> Outcome {
    let mut report = match a.basis {
        Basis::A => Report::new(
            "table",
            "commutators of the nine first-order symmetry operators A1..A9",
            seed,
        ),
        Basis::X => Report::new(
            "table",
            "brackets of the nine symmetry vector fields X1..X9",
            seed,
        ),
        Basis::So31 => Report::new(
            "table",
            "so(3,1) in the contraction basis with parameter g",
            seed,
        ),
    };
    report = report.input("basis", format!("{:?}", a.basis));
    if let Some(g) = &a.gamma {
        report = report.input("gamma", g);
    }
    match a.basis {
        Basis::A | Basis::X => {
            let a_names = basis_names("A", 9);
            let expected_a = table_from_relations(a_names.clone(), A_RELATIONS);
            let (tab, expected) = if a.basis == Basis::A {
                (commutator_table(&a_basis(), a_names)?, expected_a)
            } else {
                let x_names = basis_names("X", 9);
                (
                    vector_field_table(&x_basis(), x_names.clone())?,
                    expected_a.sign_transform(&SIGNS)?.renamed(x_names),
                )
            };
            let mismatches = table_mismatches(&tab, &expected);
            let structure = analyze_structure(&tab);
            let n = tab.dim();
            let pairs = n * (n - 1) / 2;
            report.passed = mismatches.is_empty();
            report.line(format!(
                "  {pairs} brackets checked, {} nonzero, {} mismatches",
                nonzero_brackets(&tab),
                mismatches.len()
            ));
            for i in 0..n {
                for j in i + 1..n {
                    let e = tab.entry_string(i, j);
                    if e != "0" {
                        report.line(format!("  [{}, {}] = {e}", tab.names()[i], tab.names()[j]));
                    }
                }
            }
            if let Some(m) = mismatches.first() {
                report.line(format!("  first mismatch: {m}"));
                eprintln!("first mismatch: {m}");
            }
            report.line(format!("  labels: {}", structure.labels.join(", ")));
            report.result = json!({
                "pairs_checked": pairs,
                "nonzero": nonzero_brackets(&tab),
                "first_mismatch": mismatches.first(),
                "mismatches": mismatches,
                "table": to_value(&tab),
                "structure": to_value(&structure),
            });
        }
        Basis::So31 => {
            let c = so31_contraction()?;
            let n = c.dim();
            let mut negative = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if c.structure(i, j, k).min_power().is_some_and(|p| p < 0) {
                            negative.push(format!(
                                "[{}, {}] -> {}",
                                c.names()[i],
                                c.names()[j],
                                c.names()[k]
                            ));
                        }
                    }
                }
            }
            let jacobi = c.jacobi_violations().len();
            let lim = c.limit()?;
            let sub = commutator_table(&a_basis(), basis_names("A", 9))?
                .change_basis(&contraction_in_a_basis(), lim.names().to_vec())?;
            let mismatches = table_mismatches(&sub, &lim);
            report.passed = negative.is_empty() && jacobi == 0 && mismatches.is_empty();
            for i in 0..n {
                for j in i + 1..n {
                    report.line(format!(
                        "  [{}, {}] = {}",
                        c.names()[i],
                        c.names()[j],
                        c.entry_string(i, j)
                    ));
                }
            }
            report.line(format!(
                "  {} negative powers of g, {jacobi} Jacobi violations, g -> 0 limit differs from the A-basis subalgebra in {} entries",
                negative.len(),
                mismatches.len()
            ));
            if let Some(m) = mismatches.first() {
                eprintln!("first mismatch: {m}");
            }
            let at_gamma = a.gamma.as_ref().map(|g| c.eval(g));
            let structure = at_gamma.as_ref().map(analyze_structure);
            report.result = json!({
                "parametric": to_value(&c),
                "negative_powers": negative,
                "jacobi_violations": jacobi,
                "limit": to_value(&lim),
                "limit_in_a_basis": ["A4", "A5", "A7", "A8", "A6", "2*A9"],
                "first_mismatch": mismatches.first(),
                "mismatches": mismatches,
                "at_gamma": at_gamma.as_ref().map(to_value),
                "structure_at_gamma": structure.as_ref().map(to_value),
            });
        }
    }
    Ok(report)
}

fn verify(kind: &VerifyKind, seed: u64) -> Outcome {
    match kind {
        VerifyKind::Symmetry => {
            let mut report = Report::new(
                "verify symmetry",
                "[L, A_i] = xi_i L for the nine generators",
                seed,
            );
            let l = psde_operator();
            let mut checks = CheckReport::default();
            let mut rows = Vec::new();
            for i in 1..=9 {
                let want = match i {
                    2 => ScalarExpr::int(2),
                    3 => ScalarExpr::t().scale(&rat(2, 1)),
                    _ => ScalarExpr::zero(),
                };
                let got = check_symmetry(&l, &make_generator_a(i)?);
                let detail = match &got {
                    Some(xi) => format!("xi = {xi}"),
                    None => "commutator is not a multiple of L".into(),
                };
                checks.push(psde_core::Check::new(
                    format!("A{i}"),
                    got.as_ref() == Some(&want),
                    detail,
                ));
                rows.push(json!({
                    "generator": format!("A{i}"),
                    "operator": make_generator_a(i)?.to_string(),
                    "xi": got.map(|x| x.to_string()),
                }));
            }
            report.passed = checks.passed();
            push_checks(&mut report, &checks);
            report.result = json!({ "generators": rows, "summary": check_summary(&checks) });
            Ok(report)
        }
        VerifyKind::Determining { families } => {
            let mut report = Report::new(
                "verify determining",
                "determining equations of first-order symmetries",
                seed,
            )
            .input("families", families);
            let mut checks = CheckReport::default();
            for i in 1..=9 {
                let r = check_determining_equations(&make_generator_x(i)?);
                for mut c in r.checks {
                    c.name = format!("X{i}: {}", c.name);
                    checks.push(c);
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut params = Vec::new();
            for f in 0..*families {
                let c: [Rational; 9] =
                    std::array::from_fn(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=9)));
                params.push(c.iter().map(|q| q.to_string()).collect::<Vec<_>>());
                for mut ch in check_determining_equations(&general_symmetry_family(&c)).checks {
                    ch.name = format!("family {f}: {}", ch.name);
                    checks.push(ch);
                }
            }
            report.passed = checks.passed();
            report.line(format!(
                "  {} residuals checked, {} nonzero",
                checks.len(),
                checks.failures().count()
            ));
            for c in checks.failures() {
                report.line(format!("  [FAIL] {}: {}", c.name, c.detail));
            }
            report.result =
                json!({ "family_parameters": params, "summary": check_summary(&checks) });
            Ok(report)
        }
        VerifyKind::Virasoro { range } => {
            if *range < 0 {
                return Err(usage(format!("range {range} must be nonnegative")));
            }
            let mut report = Report::new(
                "verify virasoro",
                "Witt relations of d_n = -t^(n+1) L and brackets of t^m L with K+, K0, K-",
                seed,
            )
            .input("range", range);
            let checks = virasoro_check(-range..=*range);
            report.passed = checks.passed();
            report.line(format!(
                "  {}/{} relations hold",
                checks.len() - checks.failures().count(),
                checks.len()
            ));
            for c in checks.failures() {
                report.line(format!("  [FAIL] {}: {}", c.name, c.detail));
            }
            report.result = check_summary(&checks);
            Ok(report)
        }
        VerifyKind::Contraction => table(
            &TableArgs {
                basis: Basis::So31,
                gamma: None,
            },
            seed,
        )
        .map(|mut r| {
            r.command = "verify contraction".into();
            r
        }),
        VerifyKind::Duality => {
            let mut report = Report::new(
                "verify duality",
                "exchange x <-> p, t -> 1/t on the operator, the generators and solutions",
                seed,
            );
            let mut checks = CheckReport::default();
            let l = psde_operator();
            let image = exchange_involution(&l)?;
            let want = l.mul_scalar(&-ScalarExpr::t().pow(2));
            checks.push(psde_core::Check::new(
                "L -> -t^2 L",
                image == want,
                image.to_string(),
            ));
            let images: [(usize, usize, i64); 9] = [
                (1, 3, -1),
                (2, 2, -1),
                (3, 1, -1),
                (4, 4, 1),
                (5, 6, 1),
                (6, 5, 1),
                (7, 8, 1),
                (8, 7, 1),
                (9, 9, 1),
            ];
            for (i, j, s) in images {
                let img = exchange_involution(&make_generator_a(i)?)?;
                let want = make_generator_a(j)?.scale(&rat(s, 1));
                let name = if s < 0 {
                    format!("A{i} -> -A{j}")
                } else {
                    format!("A{i} -> A{j}")
                };
                checks.push(psde_core::Check::new(name, img == want, img.to_string()));
                let twice = exchange_involution(&img)?;
                checks.push(psde_core::Check::new(
                    format!("A{i}: involutive"),
                    twice == make_generator_a(i)?,
                    twice.to_string(),
                ));
            }
            for (name, psi) in test_solutions()? {
                let d = dual(&psi)?;
                let r = psde_residual(&d);
                checks.push(psde_core::Check::new(
                    format!("dual of {name} is a solution"),
                    r.is_zero(),
                    format!("residual {r}"),
                ));
            }
            report.passed = checks.passed();
            push_checks(&mut report, &checks);
            report.result = check_summary(&checks);
            Ok(report)
        }
        VerifyKind::Lift => {
            let mut report = Report::new(
                "verify lift",
                "Q = t^(1/2) exp(-t p^2/4) u(x, p t, t) for solutions u of u_t = u_xx - u_yy",
                seed,
            );
            let sols = [
                "1",
                "x*p",
                "x^2 + 2*t",
                "p^2 - 2*t",
                "t^-1/2*exp(-1/4*t^-1*x^2)",
            ];
            let mut checks = CheckReport::default();
            let mut rows = Vec::new();
            for s in sols {
                let u: GaussianExpr = s
                    .parse()
                    .map_err(|e: Error| Failure::Runtime(e.to_string()))?;
                let lift = lift_standard(&u)?;
                let ok = lift.matched == LiftTarget::Unscaled
                    && lift.unscaled_residual.is_zero()
                    && lift.rescaled_psde_residual.is_zero();
                checks.push(psde_core::Check::new(
                    format!("u = {s}"),
                    ok,
                    format!("matched {:?}, Q = {}", lift.matched, lift.q),
                ));
                rows.push(json!({ "u": s, "lift": to_value(&lift) }));
            }
            report.passed = checks.passed();
            push_checks(&mut report, &checks);
            report.line(format!("  {SCALE_RELATION}"));
            report.result = json!({
                "matched_operator": "d/dt - d2/dx2 + t^-2 d2/dp2",
                "scale_relation": SCALE_RELATION,
                "lifts": rows,
                "summary": check_summary(&checks),
            });
            Ok(report)
        }
    }
}

fn read_expr(path: &Path) -> Result<GaussianExpr, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    text.trim()
        .parse()
        .map_err(|e: Error| usage(format!("{}: {e}", path.display())))
}

fn emit(path: &Path, psi: &GaussianExpr) -> Result<(), Failure> {
    std::fs::write(path, format!("{psi}\n"))
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

/// Default sampling times inside the window `(lo, hi)` of a solution.
fn window_times(lo: &Rational, hi: Option<&Rational>) -> Vec<Rational> {
    let lo = if lo.is_zero() || *lo < Rational::zero() {
        Rational::zero()
    } else {
        lo.clone()
    };
    match hi {
        None => [rat(1, 2), rat(1, 1), rat(2, 1)]
            .iter()
            .map(|d| &lo + d)
            .collect(),
        Some(hi) => [rat(1, 4), rat(1, 2), rat(3, 4)]
            .iter()
            .map(|f| &lo + &(hi - &lo) * f)
            .collect(),
    }
}

fn sample(
    report: &mut Report,
    psi: &GaussianExpr,
    args: &SampleArgs,
    window: (Rational, Option<Rational>),
    precision: Option<usize>,
) -> Result<Value, Failure> {
    let Some(grid) = args.grid else {
        return Ok(Value::Null);
    };
    let times = if args.t.is_empty() {
        window_times(&window.0, window.1.as_ref())
    } else {
        args.t.clone()
    };
    for t in &times {
        let inside =
            *t > window.0 && window.1.as_ref().is_none_or(|hi| t < hi) && *t > Rational::zero();
        if !inside {
            return Err(usage(format!(
                "sampling time t = {t} is outside the window of the solution"
            )));
        }
    }
    let n: i64 = match grid {
        Grid::Default => 9,
        Grid::Fine => 41,
    };
    let axis: Vec<Rational> = (0..n).map(|k| rat(-2, 1) + rat(4 * k, n - 1)).collect();
    let compiled = psi.compile();
    let mut table = Table::new(&["x", "p", "t", "value"]);
    for t in &times {
        for x in &axis {
            for p in &axis {
                let value = match precision {
                    Some(bits) => {
                        let b = |q: &Rational| BigReal::from_rational(q, bits);
                        psi.eval_with(&b(x), &b(p), &b(t), bits)?.to_string()
                    }
                    None => {
                        let f = |q: &Rational| q.to_f64().unwrap_or(f64::NAN);
                        compiled.eval(f(x), f(p), f(t)).to_string()
                    }
                };
                table.push(vec![x.to_string(), p.to_string(), t.to_string(), value]);
            }
        }
    }
    let rows = table.rows.clone();
    report.table = Some(table);
    Ok(json!({
        "columns": ["x", "p", "t", "value"],
        "times": times.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "rows": rows,
    }))
}

fn solution(kind: &SolutionKind, cli: &Cli) -> Outcome {
    let seed = cli.seed;
    let zero = Rational::zero();
    // (report, expression, residual checked, extra checks, window, sample args)
    let (mut report, psi, solves, extra, window, args) = match kind {
        SolutionKind::Kernel {
            two_sided,
            side,
            x0,
            t0,
            p0,
            t1,
            sample,
        } => {
            let params = KernelParams {
                x0: x0.clone(),
                t0: t0.clone(),
                p0: p0.clone(),
                t1: t1.clone(),
            };
            let (k, subject, window) = match (two_sided, side) {
                (true, _) => (
                    KernelKind::TwoSided,
                    "two-sided kernel with initial data at t0 in x and t1 in p",
                    (t0.clone(), Some(t1.clone())),
                ),
                (false, Side::X) => (
                    KernelKind::XSide,
                    "x-kernel started at t0",
                    (t0.clone(), None),
                ),
                (false, Side::P) => (
                    KernelKind::PSide,
                    "p-kernel ending at t1",
                    (zero.clone(), Some(t1.clone())),
                ),
            };
            let r = Report::new("solution kernel", subject, seed)
                .input("kind", format!("{k:?}"))
                .input("x0", x0)
                .input("t0", t0)
                .input("p0", p0)
                .input("t1", t1);
            (
                r,
                kernel(k, &params)?,
                true,
                CheckReport::default(),
                window,
                sample,
            )
        }
        SolutionKind::Thermal { nbar, sample } => (
            Report::new(
                "solution thermal",
                "thermal distribution with mean occupation nbar",
                seed,
            )
            .input("nbar", nbar),
            thermal(nbar)?,
            true,
            CheckReport::default(),
            (zero.clone(), None),
            sample,
        ),
        SolutionKind::Heatpoly {
            n,
            unscaled,
            sample,
        } => {
            let psi = heat_polynomial(*n, !unscaled)?;
            let mut extra = CheckReport::default();
            if !unscaled {
                let iter = a5_power_on_one(*n);
                extra.push(psde_core::Check::new(
                    "equals A5^n applied to 1",
                    GaussianExpr::scalar(iter.clone()) == psi,
                    iter.to_string(),
                ));
            }
            let subject = if *unscaled {
                "heat polynomial v_n(x, t)"
            } else {
                "heat polynomial v_n(2x, t)"
            };
            (
                Report::new("solution heatpoly", subject, seed)
                    .input("n", n)
                    .input("unscaled", unscaled),
                psi,
                !unscaled,
                extra,
                (zero.clone(), None),
                sample,
            )
        }
        SolutionKind::Hermite { n, sample } => {
            let psi = hermite(*n)?;
            let iter = raising_operator_power(*n, &rat(2, 1), &rat(1, 1))?;
            let mut extra = CheckReport::default();
            extra.push(psde_core::Check::new(
                "equals (2x - d/dx)^n applied to 1",
                iter == psi,
                iter.to_string(),
            ));
            (
                Report::new("solution hermite", "Hermite polynomial H_n(x)", seed).input("n", n),
                psi,
                false,
                extra,
                (zero.clone(), None),
                sample,
            )
        }
        SolutionKind::Ghp {
            n,
            alpha,
            beta,
            sample,
        } => {
            let psi = generalized_hermite(*n, alpha, beta)?;
            let mut extra = CheckReport::default();
            if !alpha.is_zero() {
                let b = rat(2, 1) * beta / alpha;
                let iter = raising_operator_power(*n, alpha, &b)?;
                extra.push(psde_core::Check::new(
                    format!("equals ({alpha} x - {b} d/dx)^n applied to 1"),
                    iter == psi,
                    iter.to_string(),
                ));
            }
            (
                Report::new(
                    "solution ghp",
                    "generalized Hermite polynomial with generating function exp(l alpha x - beta l^2)",
                    seed,
                )
                .input("n", n)
                .input("alpha", alpha)
                .input("beta", beta),
                psi,
                false,
                extra,
                (zero.clone(), None),
                sample,
            )
        }
        SolutionKind::Transformed { gamma, n, sample } => (
            Report::new(
                "solution transformed",
                "G_3(gamma) applied to v_n(2x, t)",
                seed,
            )
            .input("gamma", gamma)
            .input("n", n),
            transformed_heat_poly(gamma, *n)?,
            true,
            CheckReport::default(),
            (zero.clone(), None),
            sample,
        ),
    };
    let mut checks = extra;
    let residual = solves.then(|| psde_residual(&psi));
    if let Some(r) = &residual {
        checks.push(psde_core::Check::new(
            "residual vanishes identically",
            r.is_zero(),
            r.to_string(),
        ));
    }
    if let Some(path) = &args.emit {
        emit(path, &psi)?;
        report = report.input("emit", path.display());
    }
    if let Some(g) = args.grid {
        report = report.input("grid", format!("{g:?}").to_lowercase());
    }
    let samples = sample(&mut report, &psi, args, window, cli.precision)?;
    report.passed = checks.passed();
    report.line(format!("  {psi}"));
    push_checks(&mut report, &checks);
    report.result = json!({
        "expression": psi.to_string(),
        "residual": residual.map(|r| r.to_string()),
        "summary": check_summary(&checks),
        "samples": samples,
    });
    Ok(report)
}

fn group_param(a: &ApplyArgs) -> Result<GroupParam, Failure> {
    match (&a.lambda, &a.scale, &a.c, &a.s) {
        (Some(l), None, None, None) => Ok(GroupParam::Lambda(l.clone())),
        (None, Some(s), None, None) => Ok(GroupParam::Scale(s.clone())),
        (None, None, Some(c), Some(s)) => Ok(GroupParam::Hyperbola {
            c: c.clone(),
            s: s.clone(),
        }),
        _ => Err(usage(
            "give exactly one of --lambda, --scale, or --c with --s",
        )),
    }
}

fn apply(a: &ApplyArgs, seed: u64) -> Outcome {
    let param = group_param(a)?;
    let psi = match (&a.solution, &a.expr) {
        (Some(path), _) => read_expr(path)?,
        (None, Some(e)) => e.parse().map_err(|e: Error| usage(e))?,
        (None, None) => return Err(usage("give --solution or --expr")),
    };
    let action = group_action(a.i, &param)?;
    let image = match &a.reference_t {
        Some(r) => action.apply_at(&psi, r)?,
        None => apply_group(a.i, &param, &psi)?,
    };
    let before = psde_residual(&psi);
    let after = psde_residual(&image);
    let mut report = Report::new(
        "apply-group",
        "finite transformation G_i applied to a function",
        seed,
    )
    .input("i", a.i)
    .input("param", &param)
    .input("input", &psi);
    if let Some(r) = &a.reference_t {
        report = report.input("reference_t", r);
    }
    if let Some(path) = &a.emit {
        emit(path, &image)?;
        report = report.input("emit", path.display());
    }
    report.passed = !before.is_zero() || after.is_zero();
    report.line(format!("  image: {image}"));
    report.line(format!("  residual of input: {before}"));
    report.line(format!("  residual of image: {after}"));
    report.result = json!({
        "action": to_value(&action),
        "image": image.to_string(),
        "input_is_solution": before.is_zero(),
        "image_is_solution": after.is_zero(),
        "input_residual": before.to_string(),
        "image_residual": after.to_string(),
    });
    Ok(report)
}

fn classify(b: &str, seed: u64) -> Outcome {
    let expr: ScalarExpr = b.parse().map_err(|e: Error| usage(e))?;
    let c = classify_b(&expr)?;
    let mut report = Report::new(
        "classify-b",
        "symmetry class of u_t = u_xx - b(t) u_pp",
        seed,
    )
    .input("b", &expr);
    report.passed = c.verification.passed();
    report.line(format!("  class {:?}, dimension {}", c.class, c.dimension));
    for g in &c.generators {
        report.line(format!("  {g}"));
    }
    push_checks(&mut report, &c.verification);
    report.result = to_value(&c);
    Ok(report)
}

fn flow(a: &FlowArgs, seed: u64) -> Outcome {
    let field = FlowField::for_generator(a.i)?;
    let mut states = Vec::new();
    let end = flow_trajectory(
        &field,
        a.lambda,
        (a.x, a.p, a.t),
        a.step,
        Some((&mut states, a.every)),
    )?;
    let exact = closed_form_state(a.i, a.lambda, (a.x, a.p, a.t));
    let mut report = Report::new("flow", "RK4 flow of the group generator B_i", seed)
        .input("i", a.i)
        .input("lambda", a.lambda)
        .input("x", a.x)
        .input("p", a.p)
        .input("t", a.t)
        .input("step", a.step)
        .input("every", a.every)
        .tolerance("closed_form", a.tol);
    let mut table = Table::new(&["lambda", "X", "P", "T", "sigma"]);
    for s in &states {
        table.push(vec![
            s.lambda.to_string(),
            s.x.to_string(),
            s.p.to_string(),
            s.t.to_string(),
            s.sigma().to_string(),
        ]);
    }
    report.table = Some(table);
    report.line(format!(
        "  end: X = {}, P = {}, T = {}, sigma = {}",
        end.x,
        end.p,
        end.t,
        end.sigma()
    ));
    let comparison = match exact {
        Ok(ex) => {
            let ce = (end.x - ex.x)
                .abs()
                .max((end.p - ex.p).abs())
                .max((end.t - ex.t).abs());
            let se = (end.sigma() - ex.sigma()).abs() / ex.sigma().max(1.0);
            report.passed = ce <= a.tol && se <= a.tol;
            report.line(format!(
                "  closed form: coordinate error {ce:e}, multiplier error {se:e}"
            ));
            json!({ "closed_form": to_value(&ex), "coordinate_error": ce, "sigma_error": se })
        }
        Err(e) => {
            report.passed = false;
            report.line(format!("  closed form unavailable: {e}"));
            json!({ "closed_form_error": e.to_string() })
        }
    };
    report.result = json!({
        "end": to_value(&end),
        "comparison": comparison,
        "trajectory": to_value(&states),
    });
    Ok(report)
}

fn delta(a: &DeltaArgs, seed: u64) -> Outcome {
    let kind = match a.side {
        Side::X => KernelKind::XSide,
        Side::P => KernelKind::PSide,
    };
    let mut report = Report::new(
        "delta-test",
        "integral of a one-sided kernel against a test function near its initial time",
        seed,
    )
    .input("side", format!("{:?}", a.side).to_lowercase())
    .input("center", &a.center)
    .input("eps", format!("{:?}", a.eps))
    .input("phi", format!("{:?}", a.phi).to_lowercase())
    .tolerance("slack", a.slack)
    .tolerance("floor", a.floor);
    let mut tables = Vec::new();
    let mut csv = Table::new(&["phi", "eps", "integral", "error", "reduction"]);
    let mut passed = true;
    for phi in &a.phi {
        let f = match phi {
            Phi::Gaussian => TestFunction::Gaussian,
            Phi::Lorentzian => TestFunction::Lorentzian,
            Phi::Cosine => TestFunction::Cosine,
            Phi::One => TestFunction::One,
        };
        let tab = delta_limit_test(kind, f, &a.center, &a.eps)?;
        let ok = tab.first_order(a.slack, a.floor);
        passed &= ok;
        report.line(format!(
            "  {}: {}",
            f.name(),
            if ok { "first order" } else { "FAIL" }
        ));
        for r in &tab.rows {
            let red = r.reduction.map(|v| v.to_string()).unwrap_or_default();
            report.line(format!(
                "    eps {:e}: error {:e} reduction {red}",
                r.eps, r.error
            ));
            csv.push(vec![
                f.name().to_string(),
                r.eps.to_string(),
                r.integral.to_string(),
                r.error.to_string(),
                red,
            ]);
        }
        tables.push(json!({ "table": to_value(&tab), "first_order": ok }));
    }
    report.passed = passed;
    report.table = Some(csv);
    report.result = json!({ "functions": tables });
    Ok(report)
}

fn invariance(a: &InvarianceArgs, seed: u64) -> Outcome {
    let tab = integral_invariance(&a.gamma, &a.t, a.tol)?;
    let mut report = Report::new(
        "invariance",
        "x and p integrals of G_3(gamma) 1 and G_1(gamma) 1 compared with sqrt(pi)",
        seed,
    )
    .input("gamma", &a.gamma)
    .input(
        "t",
        a.t.iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(","),
    )
    .tolerance("integral", a.tol);
    report.passed = tab.equals_target && tab.independent_of_t;
    let mut csv = Table::new(&["t", "x_integral", "p_integral"]);
    for r in &tab.rows {
        report.line(format!("  t = {}: {} {}", r.t, r.x_integral, r.p_integral));
        csv.push(vec![
            r.t.to_string(),
            r.x_integral.to_string(),
            r.p_integral.to_string(),
        ]);
    }
    report.line(format!(
        "  target {} closed form {} max deviation {:e} spread {:e}",
        tab.target, tab.closed_form, tab.max_deviation, tab.spread
    ));
    report.table = Some(csv);
    report.result = to_value(&tab);
    Ok(report)
}
