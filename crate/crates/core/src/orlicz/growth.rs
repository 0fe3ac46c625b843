//! Growth functions M(a) = sup_b Phi(ab)/Phi(b), m(a) = inf_b Phi(ab)/Phi(b)
//! and the log-log slope estimates of the sharp indices built from them.

use serde::{Deserialize, Serialize};

use super::{OrliczError, OrliczFunction, Result};
use crate::numerics::extrap::{end_limit, End};
use crate::numerics::roots::{golden_max, golden_min};
use crate::numerics::{linear_fit, LinearFit, LogGrid};

/// Residual cap for the affine fit of ln M(a) against ln a.
pub const FIT_RESIDUAL_CAP: f64 = 1e-2;

/// Returns `(M(a), m(a))` for `a > 1`.
pub fn growth_function(phi: &OrliczFunction, a: f64, grid: &LogGrid) -> Result<(f64, f64)> {
    if !(a > 1.0) {
        return Err(OrliczError::Domain { op: "growth_function", value: a });
    }
    let q = |b: f64| phi.value(a * b) / phi.value(b);
    let pts = grid.points();
    let vals: Vec<f64> = pts.iter().map(|&b| q(b)).collect();
    let (mut imax, mut imin) = (0, 0);
    for i in 1..vals.len() {
        if vals[i] > vals[imax] {
            imax = i;
        }
        if vals[i] < vals[imin] {
            imin = i;
        }
    }
    let qln = |u: f64| q(u.exp());
    let br = |i: usize| (pts[i.saturating_sub(1)].ln(), pts[(i + 1).min(pts.len() - 1)].ln());
    let (lo, hi) = br(imax);
    let mut big = vals[imax].max(golden_max(qln, lo, hi, 1e-10).1);
    let (lo, hi) = br(imin);
    let mut small = vals[imin].min(golden_min(qln, lo, hi, 1e-10).1);
    for end in [End::Zero, End::Infinity] {
        let lim = end_limit(q, end);
        if lim.value.is_finite() {
            big = big.max(lim.value);
            small = small.min(lim.value);
        }
    }
    Ok((big, small))
}

/// Slope estimates of the sharp indices. These are numerical estimates: they
/// say nothing about whether the infimum/supremum defining p⊕/p⊖ is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpIndexEstimate {
    pub p_oplus_est: f64,
    pub p_ominus_est: f64,
    pub fit_upper: LinearFit,
    pub fit_lower: LinearFit,
    pub a_values: Vec<f64>,
}

pub fn estimate_sharp_indices(phi: &OrliczFunction) -> Result<SharpIndexEstimate> {
    let grid = LogGrid::default();
    let a_values: Vec<f64> = (1..=10).map(|k| 2f64.powi(k)).collect();
    let mut xs = Vec::new();
    let mut up = Vec::new();
    let mut down = Vec::new();
    for &a in &a_values {
        let (big, small) = growth_function(phi, a, &grid)?;
        xs.push(a.ln());
        up.push(big.ln());
        down.push(small.ln());
    }
    let fit_upper = linear_fit(&xs, &up).ok_or_else(|| OrliczError::Validation("degenerate fit".into()))?;
    let fit_lower = linear_fit(&xs, &down).ok_or_else(|| OrliczError::Validation("degenerate fit".into()))?;
    let residual = fit_upper.max_residual.max(fit_lower.max_residual);
    if !(residual <= FIT_RESIDUAL_CAP) {
        return Err(OrliczError::Fit { residual, cap: FIT_RESIDUAL_CAP });
    }
    Ok(SharpIndexEstimate {
        p_oplus_est: fit_upper.slope,
        p_ominus_est: fit_lower.slope,
        fit_upper,
        fit_lower,
        a_values,
    })
}
