//! Ordinary least squares on (x, y) pairs.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination. Exactly-affine data (including constant
    /// data) gets 1.
    pub r2: f64,
    /// Largest absolute residual.
    pub max_residual: f64,
}

/// Fit `y = slope * x + intercept`. Returns `None` for fewer than two points
/// or when all `x` coincide.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ssr = 0.0;
    let mut max_residual: f64 = 0.0;
    for i in 0..n {
        let r = ys[i] - (slope * xs[i] + intercept);
        ssr += r * r;
        max_residual = max_residual.max(r.abs());
    }
    let scale = syy.max(my * my * nf);
    let r2 = if syy <= 1e-28 * scale.max(f64::MIN_POSITIVE) {
        1.0
    } else {
        1.0 - ssr / syy
    };
    Some(LinearFit { slope, intercept, r2, max_residual })
}
