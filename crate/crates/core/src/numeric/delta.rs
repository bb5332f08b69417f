//! Delta-sequence limits of the one-sided kernels.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::quadrature::gaussian_quadrature;
use crate::error::{Error, Result};
use crate::solutions::{p_kernel, x_kernel, KernelKind};
use crate::Rational;

/// Smooth test functions for the delta limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TestFunction {
    Gaussian,
    Lorentzian,
    Cosine,
    One,
}

impl TestFunction {
    pub const LIBRARY: [TestFunction; 3] = [
        TestFunction::Gaussian,
        TestFunction::Lorentzian,
        TestFunction::Cosine,
    ];

    pub fn eval(self, x: f64) -> f64 {
        match self {
            TestFunction::Gaussian => (-x * x).exp(),
            TestFunction::Lorentzian => 1.0 / (1.0 + x * x),
            TestFunction::Cosine => x.cos(),
            TestFunction::One => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::Gaussian => "exp(-x^2)",
            TestFunction::Lorentzian => "1/(1+x^2)",
            TestFunction::Cosine => "cos(x)",
            TestFunction::One => "1",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaRow {
    pub eps: f64,
    pub integral: f64,
    pub error: f64,
    /// Error at the previous `ε` divided by this one.
    pub reduction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaTable {
    pub kind: KernelKind,
    pub phi: TestFunction,
    pub center: f64,
    pub rows: Vec<DeltaRow>,
}

impl DeltaTable {
    /// Every reduction is the `ε` ratio within a factor `slack`, or the errors are already below
    /// `floor`.
    pub fn first_order(&self, slack: f64, floor: f64) -> bool {
        self.rows.windows(2).all(|w| {
            if w[1].error <= floor && w[0].error <= floor {
                return true;
            }
            let want = w[0].eps / w[1].eps;
            let got = w[0].error / w[1].error;
            got >= want / slack && got <= want * slack
        })
    }
}

const QUAD_TOL: f64 = 1e-14;

/// `|∫ K φ − φ(center)|` as the kernel approaches its initial time: `t = t0 + ε` for the
/// `x`-kernel from `t0 = 0`, `t = t1 − ε` for the `p`-kernel with `t1 = 1`.
pub fn delta_limit_test(
    kind: KernelKind,
    phi: TestFunction,
    center: &Rational,
    eps: &[f64],
) -> Result<DeltaTable> {
    if eps.windows(2).any(|w| w[1] >= w[0]) || eps.iter().any(|e| e.is_nan() || *e <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon sequence {eps:?} must be positive and decreasing"
        )));
    }
    let c = center.to_f64().unwrap_or(f64::NAN);
    type Schedule = Box<dyn Fn(f64) -> (f64, f64, f64)>;
    let (k, var_of): (_, Schedule) = match kind {
        // (t, variance, value of the other coordinate)
        KernelKind::XSide => (
            x_kernel(center, &Rational::zero())?.compile(),
            Box::new(|e: f64| (e, e / 2.0, 0.0)),
        ),
        KernelKind::PSide => {
            if eps[0] >= 1.0 {
                return Err(Error::InvalidParameter(
                    "epsilon must be below t1 = 1".into(),
                ));
            }
            (
                p_kernel(center, &Rational::from_integer(1.into()))?.compile(),
                Box::new(|e: f64| (1.0 - e, e / (2.0 * (1.0 - e)), 0.0)),
            )
        }
        KernelKind::TwoSided => {
            return Err(Error::InvalidParameter(
                "delta limits are taken one side at a time".into(),
            ))
        }
    };
    let target = phi.eval(c);
    let mut rows: Vec<DeltaRow> = Vec::new();
    for &e in eps {
        let (t, var, other) = var_of(e);
        let q = match kind {
            KernelKind::XSide => {
                gaussian_quadrature(|x| k.eval(x, other, t) * phi.eval(x), c, var, QUAD_TOL)?
            }
            _ => gaussian_quadrature(|p| k.eval(other, p, t) * phi.eval(p), c, var, QUAD_TOL)?,
        };
        let error = (q.value - target).abs();
        let reduction = rows.last().map(|r| r.error / error);
        rows.push(DeltaRow {
            eps: e,
            integral: q.value,
            error,
            reduction,
        });
    }
    Ok(DeltaTable {
        kind,
        phi,
        center: c,
        rows,
    })
}
