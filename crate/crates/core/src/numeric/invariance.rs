//! Marginal integrals of the conformal images of `1` and of the thermal states.

use std::f64::consts::PI;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::quadrature::gaussian_quadrature;
use crate::error::{Error, Result};
use crate::flows::{apply_group, GroupParam};
use crate::gaussian::GaussianExpr;
use crate::solutions::{kernel, thermal, KernelKind, KernelParams};
use crate::Rational;

const QUAD_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceRow {
    pub t: f64,
    /// `∫ (1+γt)^{-1/2} exp(−γx²/(1+γt)) dx`
    pub x_integral: f64,
    /// `∫ (1+γ/t)^{-1/2} exp(−γp²/(1+γ/t)) dp`
    pub p_integral: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceTable {
    pub gamma: String,
    pub target: f64,
    /// `√(π/γ)`, the value of both integrals for every `t`.
    pub closed_form: f64,
    pub rows: Vec<InvarianceRow>,
    pub max_deviation: f64,
    pub spread: f64,
    pub tolerance: f64,
    pub equals_target: bool,
    pub independent_of_t: bool,
}

/// Both marginals of `G_3(γ)·1` and `G_1(γ)·1` at each `t`, compared with `√π` and with each
/// other across `t`.
pub fn integral_invariance(
    gamma: &Rational,
    t_values: &[Rational],
    tol: f64,
) -> Result<InvarianceTable> {
    if !gamma.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} must be positive"
        )));
    }
    if t_values.iter().any(|t| !t.is_positive()) {
        return Err(Error::InvalidParameter("t values must be positive".into()));
    }
    let one = GaussianExpr::one();
    let gx = apply_group(3, &GroupParam::Lambda(gamma.clone()), &one)?.compile();
    let gp = apply_group(1, &GroupParam::Lambda(gamma.clone()), &one)?.compile();
    let g = gamma.to_f64().unwrap_or(f64::NAN);
    let mut rows = Vec::new();
    for t in t_values {
        let t = t.to_f64().unwrap_or(f64::NAN);
        let vx = (1.0 + g * t) / (2.0 * g);
        let vp = (1.0 + g / t) / (2.0 * g);
        let x_integral = gaussian_quadrature(|x| gx.eval(x, 0.0, t), 0.0, vx, QUAD_TOL)?.value;
        let p_integral = gaussian_quadrature(|p| gp.eval(0.0, p, t), 0.0, vp, QUAD_TOL)?.value;
        rows.push(InvarianceRow {
            t,
            x_integral,
            p_integral,
        });
    }
    let target = PI.sqrt();
    let all: Vec<f64> = rows
        .iter()
        .flat_map(|r| [r.x_integral, r.p_integral])
        .collect();
    let max_deviation = all.iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = hi - lo;
    Ok(InvarianceTable {
        gamma: gamma.to_string(),
        target,
        closed_form: (PI / g).sqrt(),
        rows,
        max_deviation,
        spread,
        tolerance: tol,
        equals_target: max_deviation <= tol,
        independent_of_t: spread <= tol,
    })
}

/// `∫∫ Q_th(x, p, t) dx dp` by nested quadrature.
pub fn thermal_mass(nbar: &Rational, t: f64) -> Result<f64> {
    let q = thermal(nbar)?.compile();
    let a = 2.0 * nbar.to_f64().unwrap_or(f64::NAN) + 1.0;
    let vx = (a + t) / 2.0;
    let vp = (a + 1.0 / t) / 2.0;
    let inner = |x: f64| -> f64 {
        gaussian_quadrature(|p| q.eval(x, p, t), 0.0, vp, QUAD_TOL)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    Ok(gaussian_quadrature(inner, 0.0, vx, QUAD_TOL)?.value)
}

/// Mass of a one-sided kernel over its own variable at time `t`.
pub fn kernel_mass(kind: KernelKind, params: &KernelParams, t: f64) -> Result<f64> {
    let k = kernel(kind, params)?.compile();
    let f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
    match kind {
        KernelKind::XSide => {
            let var = (t - f(&params.t0)) / 2.0;
            Ok(gaussian_quadrature(|x| k.eval(x, 0.0, t), f(&params.x0), var, QUAD_TOL)?.value)
        }
        KernelKind::PSide => {
            let t1 = f(&params.t1);
            let var = (t1 - t) / (2.0 * t * t1);
            Ok(gaussian_quadrature(|p| k.eval(0.0, p, t), f(&params.p0), var, QUAD_TOL)?.value)
        }
        KernelKind::TwoSided => Err(Error::InvalidParameter(
            "the two-sided kernel has mass in both variables".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn unit_gamma_is_invariant() {
        let ts = [rat(1, 4), rat(1, 1), rat(4, 1)];
        let tab = integral_invariance(&rat(1, 1), &ts, 1e-10).unwrap();
        assert!(tab.equals_target && tab.independent_of_t, "{tab:?}");
        let tab = integral_invariance(&rat(1, 2), &ts, 1e-10).unwrap();
        assert!(tab.independent_of_t, "{tab:?}");
        assert!((tab.rows[0].x_integral - tab.closed_form).abs() < 1e-10);
    }

    #[test]
    fn masses() {
        for n in [rat(0, 1), rat(1, 1), rat(5, 1)] {
            let m = thermal_mass(&n, 1.0).unwrap();
            assert!((m - 2.0 * PI).abs() < 1e-10, "{m}");
        }
        for t in [0.25, 1.0, 4.0] {
            let m = kernel_mass(KernelKind::XSide, &KernelParams::default(), t).unwrap();
            assert!((m - 1.0).abs() < 1e-12);
        }
        let params = KernelParams {
            t1: rat(5, 1),
            ..KernelParams::default()
        };
        for t in [0.25, 1.0, 4.0] {
            let m = kernel_mass(KernelKind::PSide, &params, t).unwrap();
            assert!((m - 1.0).abs() < 1e-12);
        }
    }
}
