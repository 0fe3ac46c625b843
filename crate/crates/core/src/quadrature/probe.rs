//! Dyadic cutoff ladder at the origin.
//!
//! `Q_k` is the integral over `[r0 2^{-k-1}, r0 2^{-k}]`. Geometric decay of
//! `Q_k` is summed in closed form, slow algebraic decay `Q_k ~ A (k+k0)^c`
//! (log-corrected integrands) is summed with a midpoint tail integral, and
//! non-decaying ladders are classified as logarithmic or power divergence.

use crate::numerics::extrap::wynn_epsilon;
use crate::numerics::{linear_fit, Integral, NeumaierSum};

use super::{GrowthModel, QuadratureSpec};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Ladder {
    Converged { value: f64, error: f64, levels: usize },
    Divergent { model: GrowthModel, partials: Vec<f64>, cutoffs: Vec<f64>, r2: f64 },
    Undecided { value: f64, error: f64, detail: String },
}

const WINDOW: usize = 16;

/// Run the ladder on `[0, r0]`. `base` is the already-integrated remainder of
/// the domain; partial values are `base + sum_{j<=k} Q_j`.
pub(crate) fn origin_ladder<P>(piece: P, r0: f64, base: f64, q: &QuadratureSpec) -> Ladder
where
    P: Fn(f64, f64) -> Integral,
{
    let mut qs: Vec<f64> = Vec::new();
    let mut sum = NeumaierSum::new();
    let mut piece_err = 0.0;
    let mut partials = Vec::new();
    let mut cutoffs = Vec::new();
    // Algebraic tail estimate at each level, for the error model.
    let mut alg: Vec<Option<f64>> = Vec::new();
    let mut alg_err = f64::INFINITY;

    for k in 0..q.probe_max_levels {
        let b = r0 * 0.5f64.powi(k as i32);
        let a = 0.5 * b;
        let it = piece(a, b);
        if !it.value.is_finite() {
            return Ladder::Undecided {
                value: f64::NAN,
                error: f64::INFINITY,
                detail: format!("non-finite piece on [{a:e}, {b:e}]"),
            };
        }
        qs.push(it.value);
        sum.add(it.value);
        piece_err += it.error;
        partials.push(base + sum.value());
        cutoffs.push(a);
        let total = base + sum.value();
        let target = 0.25 * (q.rel_tol * total.abs() + q.abs_tol);

        if k >= 3 && qs[k - 3..].iter().all(|&v| v == 0.0) {
            return Ladder::Converged { value: sum.value(), error: piece_err, levels: k + 1 };
        }
        if k >= 8 {
            if let Some((tail, terr)) = geometric_tail(&qs).map(|g| refine_geometric(&partials, base, sum.value(), g)) {
                if terr <= target {
                    return Ladder::Converged { value: sum.value() + tail, error: piece_err + terr, levels: k + 1 };
                }
            }
        }
        alg.push(algebraic_tail(&qs));
        if k + 1 >= q.probe_min_levels {
            // The fit error decays like k^-3, so comparing the total against
            // the one from half as many levels bounds it from above.
            if let (Some(t), Some(Some(t_half))) = (alg[k], alg.get(k / 2)) {
                let s_half: f64 = partials[k / 2] - base;
                alg_err = ((sum.value() + t) - (s_half + t_half)).abs();
                if alg_err <= target {
                    return Ladder::Converged { value: sum.value() + t, error: piece_err + alg_err, levels: k + 1 };
                }
            }
            if (k + 1 - q.probe_min_levels).is_multiple_of(10) {
                if let Some(d) = classify(&qs, &partials, &cutoffs) {
                    return d;
                }
            }
        }
    }
    let value = sum.value() + alg.last().copied().flatten().unwrap_or(0.0);
    Ladder::Undecided {
        value,
        error: piece_err + if alg_err.is_finite() { alg_err } else { qs.last().copied().unwrap_or(0.0).abs() },
        detail: format!("origin ladder undecided after {} levels", qs.len()),
    }
}

/// Closed-form geometric tail when the last ratios are settled.
fn geometric_tail(qs: &[f64]) -> Option<(f64, f64)> {
    let k = qs.len() - 1;
    if qs[k - 7..].iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let rho = |j: usize| qs[j] / qs[j - 1];
    let (r_now, r_prev, r_old) = (rho(k), rho(k - 1), rho(k - 6));
    if !(r_now < 0.995) {
        return None;
    }
    // Algebraic decay has 1 - rho ~ |c|/k, which drifts; geometric does not.
    if ((1.0 - r_now) - (1.0 - r_old)).abs() > 0.02 * (1.0 - r_now) {
        return None;
    }
    let tail = qs[k] * r_now / (1.0 - r_now);
    let alt = qs[k] * r_prev / (1.0 - r_prev);
    Some((tail, (tail - alt).abs() + 1e-3 * tail * (r_now - r_old).abs()))
}

/// Epsilon-accelerated tail when the pieces are a short sum of geometric
/// sequences (polynomial-like integrands); kept only if it agrees with the
/// plain geometric estimate.
fn refine_geometric(partials: &[f64], base: f64, sum: f64, (tail, terr): (f64, f64)) -> (f64, f64) {
    let mut best = (tail, terr);
    for m in [5usize, 7, 9] {
        if partials.len() < m {
            break;
        }
        let xs: Vec<f64> = partials[partials.len() - m..].iter().map(|p| p - base).collect();
        if let Some((a, b)) = wynn_epsilon(&xs) {
            let t = a - sum;
            let e = (a - b).abs() + 4.0 * f64::EPSILON * sum.abs();
            if t.is_finite() && e < best.1 && (t - tail).abs() <= terr + e {
                best = (t, e);
            }
        }
    }
    best
}

/// Tail of `Q_j ~ A (j + k0)^c` with `c < -1.05`, fitted through
/// `1/(1 - rho_j) ~ (j + k0 + (d - 1)/2) / d`, `d = -c`.
fn algebraic_tail(qs: &[f64]) -> Option<f64> {
    let n = qs.len();
    if n < WINDOW + 2 {
        return None;
    }
    let mut xs = Vec::with_capacity(WINDOW);
    let mut ys = Vec::with_capacity(WINDOW);
    for j in n - WINDOW..n {
        let (a, b) = (qs[j - 1], qs[j]);
        if !(a > 0.0 && b > 0.0 && b < a) {
            return None;
        }
        xs.push(j as f64);
        ys.push(1.0 / (1.0 - b / a));
    }
    let fit = linear_fit(&xs, &ys)?;
    if !(fit.slope > 0.0 && fit.r2 > 0.99) {
        return None;
    }
    let c = -1.0 / fit.slope;
    if !(c < -1.05) {
        return None;
    }
    let k0 = fit.intercept / fit.slope - 0.5 * (-c - 1.0);
    let kk = (n - 1) as f64;
    if !(kk + k0 > 1.0) {
        return None;
    }
    let a = qs[n - 1] * (kk + k0).powf(-c);
    Some(a * (kk + k0 + 0.5).powf(c + 1.0) / (-c - 1.0))
}

fn classify(qs: &[f64], partials: &[f64], cutoffs: &[f64]) -> Option<Ladder> {
    let n = qs.len();
    if n < WINDOW || qs[n - WINDOW..].iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let ks: Vec<f64> = (n - WINDOW..n).map(|j| j as f64).collect();
    let lq: Vec<f64> = qs[n - WINDOW..].iter().map(|v| v.ln()).collect();
    let geo = linear_fit(&ks, &lq)?;
    let ln2 = std::f64::consts::LN_2;
    if geo.slope > 0.01 * ln2 {
        // ln Q against ln(cutoff) has slope -geo.slope / ln 2.
        return Some(Ladder::Divergent {
            model: GrowthModel::Power { exponent: -geo.slope / ln2 },
            partials: partials.to_vec(),
            cutoffs: cutoffs.to_vec(),
            r2: geo.r2,
        });
    }
    if geo.slope < -0.01 * ln2 {
        return None;
    }
    let lk: Vec<f64> = (n - WINDOW..n).map(|j| (j as f64 + 1.0).ln()).collect();
    let alg = linear_fit(&lk, &lq)?;
    if alg.slope > -0.25 {
        let lx: Vec<f64> = cutoffs[n - WINDOW..].iter().map(|c| -c.ln()).collect();
        let fit = linear_fit(&lx, &partials[n - WINDOW..])?;
        return Some(Ladder::Divergent {
            model: GrowthModel::Log,
            partials: partials.to_vec(),
            cutoffs: cutoffs.to_vec(),
            r2: fit.r2,
        });
    }
    None
}
