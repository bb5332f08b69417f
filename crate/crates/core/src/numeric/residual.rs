//! Finite-difference residuals of the pseudo-diffusion operator for black-box functions.

use serde::Serialize;

use crate::error::{Error, Result};

/// Sample points and base step. The `t`-step is the square of the spatial step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub x: (f64, f64),
    pub p: (f64, f64),
    pub t: (f64, f64),
    pub points_per_axis: usize,
    pub h: f64,
    pub refinements: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x: (-1.0, 1.0),
            p: (-1.0, 1.0),
            t: (0.5, 2.0),
            points_per_axis: 5,
            h: 0.1,
            refinements: 3,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        let ok = self.h > 0.0
            && self.points_per_axis > 0
            && self.refinements >= 3
            && self.x.0 <= self.x.1
            && self.p.0 <= self.p.1
            && self.t.0 <= self.t.1;
        if !ok {
            return Err(Error::InvalidParameter(format!("malformed grid {self:?}")));
        }
        if self.t.0 - self.h * self.h <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "t-range {:?} must stay positive under the t-step",
                self.t
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let axis = |(a, b): (f64, f64)| -> Vec<f64> {
            let n = self.points_per_axis;
            if n == 1 {
                return vec![0.5 * (a + b)];
            }
            (0..n)
                .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
                .collect()
        };
        let mut out = Vec::new();
        for &x in &axis(self.x) {
            for &p in &axis(self.p) {
                for &t in &axis(self.t) {
                    out.push((x, p, t));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Spatial steps `h, h/2, h/4, …`.
    pub steps: Vec<f64>,
    /// Largest `|residual|` on the grid for each step.
    pub max_residuals: Vec<f64>,
    /// Signed residual at the location of the largest one, finest step.
    pub residual_at_max: f64,
    pub location: (f64, f64, f64),
    /// `log2` of successive ratios of the maximal residuals, averaged.
    pub order: f64,
}

impl ResidualReport {
    pub fn max_residual(&self) -> f64 {
        *self.max_residuals.last().unwrap_or(&f64::NAN)
    }
}

/// Central-difference value of `∂_t f − ¼ ∂_x² f + (1/(4t²)) ∂_p² f` with spatial step `h` and
/// time step `h²`.
pub fn fd_point<F: Fn(f64, f64, f64) -> f64>(f: &F, (x, p, t): (f64, f64, f64), h: f64) -> f64 {
    let k = h * h;
    let f0 = f(x, p, t);
    let dt = (f(x, p, t + k) - f(x, p, t - k)) / (2.0 * k);
    let dxx = (f(x + h, p, t) - 2.0 * f0 + f(x - h, p, t)) / (h * h);
    let dpp = (f(x, p + h, t) - 2.0 * f0 + f(x, p - h, t)) / (h * h);
    dt - 0.25 * dxx + dpp / (4.0 * t * t)
}

pub fn fd_residual<F: Fn(f64, f64, f64) -> f64>(f: F, grid: &GridSpec) -> Result<ResidualReport> {
    grid.validate()?;
    let points = grid.points();
    let mut steps = Vec::new();
    let mut max_residuals = Vec::new();
    let mut residual_at_max = 0.0;
    let mut location = points[0];
    for r in 0..grid.refinements {
        let h = grid.h / f64::from(1u32 << r);
        let mut worst = -1.0;
        for &pt in &points {
            let v = fd_point(&f, pt, h);
            if !v.is_finite() {
                return Err(Error::EvaluationFailure(format!(
                    "residual is not finite at {pt:?} with step {h}"
                )));
            }
            if v.abs() > worst {
                worst = v.abs();
                if r + 1 == grid.refinements {
                    residual_at_max = v;
                    location = pt;
                }
            }
        }
        steps.push(h);
        max_residuals.push(worst);
    }
    let ratios: Vec<f64> = max_residuals
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .collect();
    let order = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(ResidualReport {
        steps,
        max_residuals,
        residual_at_max,
        location,
        order,
    })
}
