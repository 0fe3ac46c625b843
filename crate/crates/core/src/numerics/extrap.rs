//! Limit estimation at the ends of a log grid.
//!
//! Three candidate models are fitted to samples taken along the outermost two
//! decades and the one with the smallest self-consistency error wins:
//! polynomial extrapolation in `1/|ln t|` (handles the logarithmic approach of
//! e.g. `t ln(1+t)`), Aitken's delta-squared on half-decade spacing
//! (power-law approach), and the raw end value. A second Aitken pass over
//! samples three decades apart (Wynn's epsilon) catches slow algebraic
//! approaches such as `p + c t^0.05` when the function stays finite that far out.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum End {
    Zero,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: f64,
    pub error: f64,
    pub model: LimitModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitModel {
    Constant,
    InverseLog,
    Aitken,
    EndValue,
}

/// Evaluate the polynomial through `(xs[i], ys[i])` at `x = 0` (Neville).
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut p = ys.to_vec();
    for m in 1..n {
        for i in 0..n - m {
            let j = i + m;
            p[i] = (xs[j] * p[i] - xs[i] * p[i + 1]) / (xs[j] - xs[i]);
        }
    }
    p[0]
}

/// Aitken delta-squared limit of three successive terms.
pub fn aitken(x0: f64, x1: f64, x2: f64) -> f64 {
    let d1 = x2 - x1;
    let d0 = x1 - x0;
    let den = d1 - d0;
    if den == 0.0 || !den.is_finite() {
        return x2;
    }
    x2 - d1 * d1 / den
}

/// Estimate `lim f(t)` as `t -> 0+` or `t -> inf`, using samples at
/// `10^{±(6 + j/2)}`, `j = 0..=4`, plus one extra decade for the end-value model.
pub fn end_limit<F: Fn(f64) -> f64>(f: F, end: End) -> LimitEstimate {
    let sign = match end {
        End::Zero => -1.0,
        End::Infinity => 1.0,
    };
    let ts: Vec<f64> = (0..5).map(|j| 10f64.powf(sign * (6.0 + 0.5 * j as f64))).collect();
    let vs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    if vs.iter().any(|v| !v.is_finite()) {
        return LimitEstimate { value: f64::NAN, error: f64::INFINITY, model: LimitModel::EndValue };
    }
    if vs.iter().all(|&v| v == vs[0]) {
        return LimitEstimate { value: vs[0], error: 0.0, model: LimitModel::Constant };
    }
    let last = vs[4];

    let ys: Vec<f64> = ts.iter().map(|t| 1.0 / t.ln().abs()).collect();
    let e4 = neville_at_zero(&ys, &vs);
    let e3 = neville_at_zero(&ys[1..], &vs[1..]);
    let inv_log = LimitEstimate { value: e4, error: (e4 - e3).abs(), model: LimitModel::InverseLog };

    let a1 = aitken(vs[2], vs[3], vs[4]);
    let a2 = aitken(vs[1], vs[2], vs[3]);
    let ait = LimitEstimate { value: a1, error: (a1 - a2).abs(), model: LimitModel::Aitken };

    let wide = wide_epsilon(&f, sign);

    let plain = LimitEstimate { value: last, error: (last - vs[2]).abs(), model: LimitModel::EndValue };

    let mut best = plain;
    for cand in [ait, inv_log].into_iter().chain(wide) {
        if cand.value.is_finite() && cand.error < best.error {
            best = cand;
        }
    }
    best
}

/// Wynn's epsilon algorithm; returns the two highest even-column estimates.
pub fn wynn_epsilon(xs: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 5 || n.is_multiple_of(2) {
        return None;
    }
    // cols[k][i] = eps_k^{(i)}; even columns hold the limit estimates.
    let mut prev = vec![0.0; n + 1];
    let mut cur = xs.to_vec();
    let mut evens = vec![cur[cur.len() - 1]];
    for k in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                return None;
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            evens.push(cur[cur.len() - 1]);
        }
    }
    let m = evens.len();
    Some((evens[m - 1], evens[m - 2]))
}

fn wide_epsilon<F: Fn(f64) -> f64>(f: &F, sign: f64) -> Option<LimitEstimate> {
    let vs: Vec<f64> = (0..7).map(|j| f(10f64.powf(sign * (6.0 + 3.0 * j as f64)))).collect();
    if vs.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let (best, prev) = wynn_epsilon(&vs)?;
    if !best.is_finite() {
        return None;
    }
    Some(LimitEstimate { value: best, error: (best - prev).abs(), model: LimitModel::Aitken })
}
