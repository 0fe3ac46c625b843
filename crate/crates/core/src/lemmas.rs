//! The splitting inequality `Phi(a+b) <= lam Phi(a) + C (lam-1)^{1-p+} Phi(b)`,
//! its threshold `xi`, and the auxiliary `h`/`g` functions.
//!
//! The constant is estimated on a log grid in `(a, b)` times a geometric
//! ladder in `lam`, then re-checked on a grid shifted by half a step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::orlicz::{OrliczError, OrliczFunction, Result};

/// Relative slack used when re-checking the inequality on the held-out grid.
const CHECK_SLACK: f64 = 1e-9;

/// `xi = Phi^{-1}(lam Phi(a)) - a`, the point where `Phi(a + b) - lam Phi(a)`
/// changes sign.
pub fn xi_threshold(phi: &OrliczFunction, a: f64, lambda: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(OrliczError::Domain { op: "xi_threshold(a)", value: a });
    }
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(OrliczError::Domain { op: "xi_threshold(lambda)", value: lambda });
    }
    let target = lambda * phi.value(a);
    let xi = phi.inverse(target)? - a;
    let back = phi.value(a + xi);
    if !(xi > 0.0) || (back - target).abs() > 1e-9 * target {
        return Err(OrliczError::Validation(format!(
            "xi back-substitution failed at a = {a}, lambda = {lambda}: Phi(a+xi) = {back}, want {target}"
        )));
    }
    Ok(xi)
}

/// `(h(lam), g(lam))` with `h = min((lam^{1/p+}-1)^{p- - 1}, (lam^{1/p+}-1)^{p+ - 1})`
/// and `g = (lam-1)^{p+ - 1} / h`.
pub fn g_h_functions(phi: &OrliczFunction, lambda: f64) -> (f64, f64) {
    g_h_with(phi.p_minus(), phi.p_plus(), lambda)
}

pub(crate) fn g_h_with(p_minus: f64, p_plus: f64, lambda: f64) -> (f64, f64) {
    let base = lambda.powf(1.0 / p_plus) - 1.0;
    let h = base.powf(p_minus - 1.0).min(base.powf(p_plus - 1.0));
    let g = (lambda - 1.0).powf(p_plus - 1.0) / h;
    (h, g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitGrid {
    pub lo: f64,
    pub hi: f64,
    /// Points per decade in `a` and `b`.
    pub per_decade: usize,
    /// Ladder points per doubling of `lam - 1`.
    pub ladder_per_octave: usize,
}

impl Default for SplitGrid {
    fn default() -> Self {
        Self { lo: 1e-4, hi: 1e4, per_decade: 8, ladder_per_octave: 1 }
    }
}

impl SplitGrid {
    fn refined(&self) -> Self {
        Self { per_decade: self.per_decade * 2, ladder_per_octave: self.ladder_per_octave * 2, ..*self }
    }

    pub fn describe(&self) -> String {
        format!(
            "a, b log-uniform on [{:e}, {:e}] at {}/decade plus a = 0; lam = 1 + 1e-3 * 2^(k/{}) up to Lambda",
            self.lo, self.hi, self.per_decade, self.ladder_per_octave
        )
    }

    /// Log-uniform points; `shift` in [0, 1) offsets by a fraction of a step.
    fn points(&self, shift: f64) -> Vec<f64> {
        let decades = (self.hi / self.lo).log10();
        let n = (decades * self.per_decade as f64).round() as usize;
        let step = decades / n as f64;
        let count = if shift == 0.0 { n + 1 } else { n };
        (0..count).map(|i| self.lo * 10f64.powf((i as f64 + shift) * step)).collect()
    }

    /// `1 + 1e-3 * 2^(k/r)` below `big_lambda`, then `big_lambda` itself.
    fn ladder(&self, big_lambda: f64, shift: f64) -> Vec<f64> {
        let r = self.ladder_per_octave as f64;
        let mut out = Vec::new();
        let mut k = 0.0;
        loop {
            let lam = 1.0 + 1e-3 * 2f64.powf((k + shift) / r);
            if lam >= big_lambda {
                break;
            }
            out.push(lam);
            k += 1.0;
        }
        if shift == 0.0 {
            out.push(big_lambda);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitWitness {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
}

/// Sup of the constant under two successive grid refinements; flagged when it
/// grows by more than 10%.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnboundedSuspicion {
    pub base: f64,
    pub refined: Vec<f64>,
    pub growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitConstantReport {
    pub big_lambda: f64,
    pub c_emp: f64,
    pub witness: Option<SplitWitness>,
    pub grid_spec: String,
    pub samples: usize,
    /// Held-out samples where the inequality with `c_emp` fails.
    pub held_out_violations: usize,
    pub held_out_samples: usize,
    /// Worst `Phi(a+b) - rhs` relative to `rhs` on the held-out grid.
    pub held_out_worst_excess: f64,
    /// Samples with `b >= a` exceeding `2^{p+} (Lambda-1)^{p+ - 1}`.
    pub region_bound_violations: usize,
    /// Sup of `g` over the ladder (finite by construction for a valid Phi).
    pub g_sup: f64,
    pub refinement_values: Vec<f64>,
    pub suspicion: Option<UnboundedSuspicion>,
}

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    witness: Option<SplitWitness>,
    region_violations: usize,
}

/// Scaled ratio `(Phi(a+b) - lam Phi(a)) (lam-1)^{p+ - 1} / Phi(b)`, clamped at 0.
#[inline]
fn scaled_ratio(phi: &OrliczFunction, p_plus: f64, a: f64, b: f64, lam: f64) -> f64 {
    let r = (phi.value(a + b) - lam * phi.value(a)) * (lam - 1.0).powf(p_plus - 1.0) / phi.value(b);
    if r > 0.0 {
        r
    } else {
        0.0
    }
}

fn sweep(phi: &OrliczFunction, big_lambda: f64, grid: &SplitGrid) -> (Best, usize) {
    let p_plus = phi.p_plus();
    let region_cap = 2f64.powf(p_plus) * (big_lambda - 1.0).powf(p_plus - 1.0) * (1.0 + CHECK_SLACK);
    let mut avals = vec![0.0];
    avals.extend(grid.points(0.0));
    let bvals = grid.points(0.0);
    let ladder = grid.ladder(big_lambda, 0.0);

    let rows: Vec<Best> = bvals
        .par_iter()
        .map(|&b| {
            let mut best = Best { value: 0.0, witness: None, region_violations: 0 };
            for &lam in &ladder {
                for &a in &avals {
                    let r = scaled_ratio(phi, p_plus, a, b, lam);
                    if b >= a && r > region_cap {
                        best.region_violations += 1;
                    }
                    if r > best.value {
                        best.value = r;
                        best.witness = Some(SplitWitness { a, b, lambda: lam });
                    }
                }
            }
            best
        })
        .collect();
    let samples = avals.len() * bvals.len() * ladder.len();
    let mut total = Best { value: 0.0, witness: None, region_violations: 0 };
    for r in rows {
        total.region_violations += r.region_violations;
        if r.value > total.value {
            total.value = r.value;
            total.witness = r.witness;
        }
    }
    (total, samples)
}

/// Estimate `C(Phi, Lambda)` on `grid`, verify it on a shifted grid and flag
/// growth under two refinements.
pub fn estimate_split_constant(phi: &OrliczFunction, big_lambda: f64, grid: &SplitGrid) -> Result<SplitConstantReport> {
    if !(big_lambda > 1.0 && big_lambda.is_finite()) {
        return Err(OrliczError::Domain { op: "estimate_split_constant", value: big_lambda });
    }
    let (best, samples) = sweep(phi, big_lambda, grid);
    let c = best.value;

    let g1 = grid.refined();
    let g2 = g1.refined();
    let refined = vec![sweep(phi, big_lambda, &g1).0.value, sweep(phi, big_lambda, &g2).0.value];
    let top = refined.iter().cloned().fold(c, f64::max);
    let growth = if c > 0.0 { top / c - 1.0 } else if top > 0.0 { f64::INFINITY } else { 0.0 };
    let suspicion = (growth > 0.1).then(|| UnboundedSuspicion { base: c, refined: refined.clone(), growth });

    // Held-out verification on half-step shifted grids.
    let p_plus = phi.p_plus();
    let avals = grid.points(0.5);
    let ladder = grid.ladder(big_lambda, 0.5);
    let checks: Vec<(usize, f64)> = avals
        .par_iter()
        .map(|&b| {
            let mut bad = 0;
            let mut worst = f64::NEG_INFINITY;
            for &lam in &ladder {
                for &a in &avals {
                    let lhs = phi.value(a + b);
                    let rhs = lam * phi.value(a) + c * (lam - 1.0).powf(1.0 - p_plus) * phi.value(b);
                    let excess = (lhs - rhs) / rhs;
                    worst = worst.max(excess);
                    if excess > CHECK_SLACK {
                        bad += 1;
                    }
                }
            }
            (bad, worst)
        })
        .collect();
    let held_out_violations = checks.iter().map(|c| c.0).sum();
    let held_out_worst_excess = checks.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);

    let g_sup = ladder_g_sup(phi, big_lambda, grid);

    Ok(SplitConstantReport {
        big_lambda,
        c_emp: c,
        witness: best.witness,
        grid_spec: grid.describe(),
        samples,
        held_out_violations,
        held_out_samples: avals.len() * avals.len() * ladder.len(),
        held_out_worst_excess,
        region_bound_violations: best.region_violations,
        g_sup,
        refinement_values: refined,
        suspicion,
    })
}

/// Sup of `g` over the ladder on `(1, Lambda]`.
pub fn ladder_g_sup(phi: &OrliczFunction, big_lambda: f64, grid: &SplitGrid) -> f64 {
    grid.ladder(big_lambda, 0.0).into_iter().map(|l| g_h_functions(phi, l).1).fold(0.0, f64::max)
}

/// Count samples `b` in `(0, xi]` where `Phi(a+b) - lam Phi(a) > 0` (beyond
/// rounding); zero for every valid Phi.
pub fn negative_region_violations(phi: &OrliczFunction, a: f64, lambda: f64, samples: usize) -> Result<usize> {
    let xi = xi_threshold(phi, a, lambda)?;
    let base = lambda * phi.value(a);
    Ok((1..=samples)
        .map(|i| xi * i as f64 / samples as f64)
        .filter(|&b| phi.value(a + b) - base > 1e-12 * base)
        .count())
}
