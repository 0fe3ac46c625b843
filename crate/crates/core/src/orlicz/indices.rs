//! The indices p- = inf f and p+ = sup f of f(t) = t phi(t) / Phi(t).

use serde::{Deserialize, Serialize};

use super::{OrliczError, OrliczFunction, Result};
use crate::numerics::extrap::{end_limit, End, LimitEstimate, LimitModel};
use crate::numerics::roots::{golden_max, golden_min};
use crate::numerics::LogGrid;

/// Where an extremum of f is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ArgExtremum {
    At(f64),
    /// Approached only as t -> 0+ or t -> inf.
    AtLimit(End),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub p_minus: f64,
    pub p_plus: f64,
    pub arg_min: ArgExtremum,
    pub arg_max: ArgExtremum,
    pub grid: LogGrid,
    pub limit_at_zero: LimitEstimate,
    pub limit_at_infinity: LimitEstimate,
}

impl IndexReport {
    pub(crate) fn placeholder() -> Self {
        let nan = LimitEstimate { value: f64::NAN, error: f64::NAN, model: LimitModel::EndValue };
        Self {
            p_minus: f64::NAN,
            p_plus: f64::NAN,
            arg_min: ArgExtremum::At(f64::NAN),
            arg_max: ArgExtremum::At(f64::NAN),
            grid: LogGrid::default(),
            limit_at_zero: nan,
            limit_at_infinity: nan,
        }
    }
}

/// Limits only replace a grid extremum when they beat it by more than this
/// (relative); otherwise the interior point is reported.
const LIMIT_MARGIN: f64 = 1e-12;

/// Grid extrema of f, refined by golden-section search in ln t around the
/// best grid point, merged with extrapolated limits at both ends.
pub fn compute_indices(phi: &OrliczFunction, grid: &LogGrid) -> Result<IndexReport> {
    let pts = grid.points();
    let mut vals = Vec::with_capacity(pts.len());
    for &t in &pts {
        let f = phi.ratio(t);
        if !f.is_finite() {
            return Err(OrliczError::Validation(format!("t phi(t)/Phi(t) is not finite at t = {t:e}")));
        }
        vals.push(f);
    }
    let (mut imin, mut imax) = (0, 0);
    for i in 1..vals.len() {
        if vals[i] < vals[imin] {
            imin = i;
        }
        if vals[i] > vals[imax] {
            imax = i;
        }
    }
    let f_ln = |u: f64| phi.ratio(u.exp());
    let bracket = |i: usize| {
        let lo = pts[i.saturating_sub(1)].ln();
        let hi = pts[(i + 1).min(pts.len() - 1)].ln();
        (lo, hi)
    };

    let (mut p_minus, mut arg_min) = (vals[imin], pts[imin]);
    let (a, c) = bracket(imin);
    let (u, v) = golden_min(f_ln, a, c, 1e-10);
    if v < p_minus {
        p_minus = v;
        arg_min = u.exp();
    }
    let (mut p_plus, mut arg_max) = (vals[imax], pts[imax]);
    let (a, c) = bracket(imax);
    let (u, v) = golden_max(f_ln, a, c, 1e-10);
    if v > p_plus {
        p_plus = v;
        arg_max = u.exp();
    }

    // Joins of piecewise definitions are natural extremum candidates, both
    // as attained values and as one-sided limits.
    for bp in phi.breakpoints() {
        let right = phi.ratio(bp);
        let left = bp * phi.deriv_left(bp) / phi.value(bp);
        if right < p_minus {
            p_minus = right;
            arg_min = bp;
        }
        if right > p_plus {
            p_plus = right;
            arg_max = bp;
        }
        if left < p_minus {
            p_minus = left;
            arg_min = bp;
        }
        if left > p_plus {
            p_plus = left;
            arg_max = bp;
        }
    }

    let mut arg_min = ArgExtremum::At(arg_min);
    let mut arg_max = ArgExtremum::At(arg_max);
    let lz = end_limit(|t| phi.ratio(t), End::Zero);
    let li = end_limit(|t| phi.ratio(t), End::Infinity);
    for (lim, end) in [(lz, End::Zero), (li, End::Infinity)] {
        if !lim.value.is_finite() {
            continue;
        }
        let margin = LIMIT_MARGIN * (1.0 + lim.value.abs());
        if lim.value < p_minus - margin {
            p_minus = lim.value;
            arg_min = ArgExtremum::AtLimit(end);
        }
        if lim.value > p_plus + margin {
            p_plus = lim.value;
            arg_max = ArgExtremum::AtLimit(end);
        }
    }
    Ok(IndexReport {
        p_minus,
        p_plus,
        arg_min,
        arg_max,
        grid: *grid,
        limit_at_zero: lz,
        limit_at_infinity: li,
    })
}
