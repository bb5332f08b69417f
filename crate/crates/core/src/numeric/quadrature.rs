//! Adaptive 7/15-point Gauss–Kronrod quadrature with a global error budget.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Gaussian tails are cut at this many standard deviations.
pub const TAIL_SIGMAS: f64 = 12.0;

const MAX_INTERVALS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let (kron, gauss) = (kron * h, gauss * h);
    if !kron.is_finite() {
        return Err(Error::EvaluationFailure(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    Ok((kron, (kron - gauss).abs()))
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) || tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "interval [{a}, {b}] and tolerance {tol} must be finite and positive"
        )));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(&f, a, b)?;
    heap.push(Piece {
        a,
        b,
        value: v,
        error: e,
    });
    let mut evaluations = 15;
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= tol {
            break;
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::NonConvergent(format!(
                "error estimate {total_err:e} above {tol:e} after {evaluations} evaluations"
            )));
        }
        let worst = heap.pop().expect("heap is nonempty");
        let m = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, m), (m, worst.b)] {
            let (v, e) = gk15(&f, lo, hi)?;
            heap.push(Piece {
                a: lo,
                b: hi,
                value: v,
                error: e,
            });
        }
        evaluations += 30;
    }
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = pairwise_sum(&pieces.iter().map(|p| p.value).collect::<Vec<_>>());
    let error = pieces.iter().map(|p| p.error).sum();
    Ok(Quadrature {
        value,
        error,
        evaluations,
    })
}

/// Sum in a fixed pairwise order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// `∫ f` over the real line for an integrand dominated by a Gaussian of the given center and
/// variance, truncated at [`TAIL_SIGMAS`] standard deviations.
pub fn gaussian_quadrature<F: Fn(f64) -> f64>(
    f: F,
    center: f64,
    variance: f64,
    tol: f64,
) -> Result<Quadrature> {
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "variance {variance} must be positive"
        )));
    }
    let w = TAIL_SIGMAS * variance.sqrt();
    quadrature(f, center - w, center + w, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_integrals() {
        let q = gaussian_quadrature(|x| (-x * x).exp(), 0.0, 0.5, 1e-13).unwrap();
        assert!((q.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let q = quadrature(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
        let q = quadrature(|x| 1.0 / (1.0 + x * x), -1.0, 1.0, 1e-13).unwrap();
        assert!((q.value - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(quadrature(|x| x, 0.0, f64::INFINITY, 1e-8).is_err());
        assert!(matches!(
            quadrature(|x| 1.0 / x, -1.0, 1.0, 1e-8),
            Err(Error::EvaluationFailure(_)) | Err(Error::NonConvergent(_))
        ));
    }
}
