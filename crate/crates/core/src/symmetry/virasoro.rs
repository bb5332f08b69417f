//! Infinite-dimensional algebras spanned by `t^m L`.

use std::ops::RangeInclusive;

use crate::check::{Check, CheckReport};
use crate::operator::DiffOperator;
use crate::psde_operator;
use crate::rat;
use crate::scalar::ScalarExpr;

use super::generators::make_generator_a;

/// `t^m · L`
pub fn t_pow_l(m: i64) -> DiffOperator {
    let tm = ScalarExpr::t().pow_int(m).expect("t is invertible");
    psde_operator().mul_scalar(&tm)
}

/// `d_n = −t^{n+1} L`
pub fn witt_generator(n: i64) -> DiffOperator {
    t_pow_l(n + 1).neg()
}

fn relation(report: &mut CheckReport, name: String, lhs: DiffOperator, rhs: DiffOperator) {
    let ok = lhs == rhs;
    let detail = if ok {
        format!("{rhs}")
    } else {
        format!("lhs {lhs} != rhs {rhs}")
    };
    report.push(Check::new(name, ok, detail));
}

/// Check `[d_m, d_n] = (m − n) d_{m+n}` for all `m, n` in `range`, the three relations among
/// `L, tL, t²L`, and the brackets of `t^m L` with `K+ = A3`, `K− = A1`, `K0 = A2/2`.
pub fn virasoro_check(range: RangeInclusive<i64>) -> CheckReport {
    let mut report = CheckReport::default();
    for m in range.clone() {
        for n in range.clone() {
            let lhs = witt_generator(m).commutator(&witt_generator(n));
            let rhs = witt_generator(m + n).scale(&rat(m - n, 1));
            relation(
                &mut report,
                format!("[d{m}, d{n}] = {}*d{}", m - n, m + n),
                lhs,
                rhs,
            );
        }
    }
    let (l0, l1, l2) = (t_pow_l(0), t_pow_l(1), t_pow_l(2));
    relation(
        &mut report,
        "[tL, L] = -L".into(),
        l1.commutator(&l0),
        l0.neg(),
    );
    relation(
        &mut report,
        "[tL, t^2L] = t^2L".into(),
        l1.commutator(&l2),
        l2.clone(),
    );
    relation(
        &mut report,
        "[L, t^2L] = 2tL".into(),
        l0.commutator(&l2),
        l1.scale(&rat(2, 1)),
    );

    let a = |i| make_generator_a(i).expect("index in range");
    let k_plus = a(3);
    let k_minus = a(1);
    let k_zero = a(2).scale(&rat(1, 2));
    for m in range {
        let tl = t_pow_l(m);
        relation(
            &mut report,
            format!("[t^{m}L, K+] = {}*t^{}L", 2 - m, m + 1),
            tl.commutator(&k_plus),
            t_pow_l(m + 1).scale(&rat(2 - m, 1)),
        );
        relation(
            &mut report,
            format!("[t^{m}L, K-] = {}*t^{}L", -m, m - 1),
            tl.commutator(&k_minus),
            t_pow_l(m - 1).scale(&rat(-m, 1)),
        );
        relation(
            &mut report,
            format!("[t^{m}L, K0] = {}*t^{m}L", 1 - m),
            tl.commutator(&k_zero),
            tl.scale(&rat(1 - m, 1)),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_range() {
        let r = virasoro_check(-2..=2);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.len(), 25 + 3 + 15);
        let d = witt_generator(1).commutator(&witt_generator(-1));
        assert_eq!(d, witt_generator(0).scale(&rat(2, 1)));
    }
}
