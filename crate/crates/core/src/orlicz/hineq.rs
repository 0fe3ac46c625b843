//! Sample-based checks of the standard inequalities satisfied by every Orlicz
//! function:
//!
//! * H1: Phi(a) <= a phi(a) <= p+ Phi(a), and a phi(a) <= Phi(2a)
//! * H2: Phi(a+b) <= 2^{p+} (Phi(a) + Phi(b))
//! * H3: min{a^{p-}, a^{p+}} Phi(b) <= Phi(ab) <= max{a^{p-}, a^{p+}} Phi(b)
//! * H4: the same with exponents 1/p-, 1/p+ for Phi^{-1}
//! * H6: C1 min{a^{p- - 1}, a^{p+ - 1}} phi(b) <= phi(ab) <= C2 max{...} phi(b)
//!
//! For H6 the admissible constants C1 = 1/p+ and C2 = 2^{p+} follow from H1
//! and H3; the empirical extremes are reported alongside.

use serde::{Deserialize, Serialize};

use super::{OrliczError, OrliczFunction, Result};

/// Relative slack on every comparison (rounding in Phi and Phi^{-1}).
const REL_SLACK: f64 = 1e-9;
/// Exponent widening that absorbs the index tolerance.
const EXP_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HLine {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    /// Largest lhs/rhs - 1 seen (negative when every sample passes strictly).
    pub worst_excess: f64,
    pub worst_witness: Option<(f64, f64)>,
    /// Empirical constants (lower, upper) where the inequality has any.
    pub empirical: Option<(f64, f64)>,
}

impl HLine {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            checked: 0,
            violations: 0,
            worst_excess: f64::NEG_INFINITY,
            worst_witness: None,
            empirical: None,
        }
    }

    /// Record `lhs <= rhs`.
    fn le(&mut self, lhs: f64, rhs: f64, a: f64, b: f64) {
        self.checked += 1;
        let excess = if rhs > 0.0 { lhs / rhs - 1.0 } else if lhs > 0.0 { f64::INFINITY } else { -1.0 };
        if excess > self.worst_excess || self.worst_witness.is_none() {
            self.worst_excess = excess;
            self.worst_witness = Some((a, b));
        }
        if lhs > rhs * (1.0 + REL_SLACK) && lhs - rhs > 1e-300 {
            self.violations += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HInequalityReport {
    pub p_minus: f64,
    pub p_plus: f64,
    pub lines: Vec<HLine>,
}

impl HInequalityReport {
    pub fn total_violations(&self) -> usize {
        self.lines.iter().map(|l| l.violations).sum()
    }
}

fn minmax_pow(a: f64, e1: f64, e2: f64) -> (f64, f64) {
    let (x, y) = (a.powf(e1), a.powf(e2));
    (x.min(y), x.max(y))
}

/// Run every inequality on every `(a, b)` pair. Returns the full report, or
/// `InequalityViolation` naming the first failing inequality and its witness.
pub fn check_h_inequalities(phi: &OrliczFunction, samples: &[(f64, f64)]) -> Result<HInequalityReport> {
    let (pm, pp) = (phi.p_minus(), phi.p_plus());
    let (pm_w, pp_w) = (pm - EXP_SLACK, pp + EXP_SLACK);
    let mut h1 = HLine::new("H1");
    let mut h2 = HLine::new("H2");
    let mut h3 = HLine::new("H3");
    let mut h4 = HLine::new("H4");
    let mut h6 = HLine::new("H6");
    let (mut r1_lo, mut r1_hi) = (f64::INFINITY, 0.0f64);
    let (mut c1_emp, mut c2_emp) = (f64::INFINITY, 0.0f64);
    let c1 = 1.0 / pp_w;
    let c2 = 2f64.powf(pp_w);

    for &(a, b) in samples {
        if !(a >= 0.0 && b >= 0.0) {
            return Err(OrliczError::Domain { op: "check_h_inequalities", value: a.min(b) });
        }
        let (fa, fb) = (phi.value(a), phi.value(b));
        let da = phi.deriv(a);

        if a > 0.0 {
            let t_phi = a * da;
            h1.le(fa, t_phi, a, b);
            h1.le(t_phi, pp_w * fa, a, b);
            h1.le(t_phi, phi.value(2.0 * a), a, b);
            r1_lo = r1_lo.min(t_phi / fa);
            r1_hi = r1_hi.max(t_phi / fa);
        }

        h2.le(phi.value(a + b), 2f64.powf(pp_w) * (fa + fb), a, b);

        let fab = phi.value(a * b);
        // Widening the exponents moves min{} down and max{} up for every a.
        let (lo3, hi3) = minmax_pow(a, pm_w, pp_w);
        h3.le(lo3 * fb, fab, a, b);
        h3.le(fab, hi3 * fb, a, b);

        if b > 0.0 {
            let inv_b = phi.inverse(b)?;
            let inv_ab = phi.inverse(a * b)?;
            let (lo4, hi4) = minmax_pow(a, 1.0 / pm_w, 1.0 / pp_w);
            h4.le(lo4 * inv_b, inv_ab, a, b);
            h4.le(inv_ab, hi4 * inv_b, a, b);
        }

        if b > 0.0 && a > 0.0 {
            let db = phi.deriv(b);
            let dab = phi.deriv(a * b);
            let (lo6, hi6) = minmax_pow(a, pm_w - 1.0, pp_w - 1.0);
            h6.le(c1 * lo6 * db, dab, a, b);
            h6.le(dab, c2 * hi6 * db, a, b);
            c1_emp = c1_emp.min(dab / (lo6 * db));
            c2_emp = c2_emp.max(dab / (hi6 * db));
        }
    }
    h1.empirical = Some((r1_lo, r1_hi));
    h6.empirical = Some((c1_emp, c2_emp));
    let lines = vec![h1, h2, h3, h4, h6];
    for l in &lines {
        if l.violations > 0 {
            let (a, b) = l.worst_witness.unwrap_or((f64::NAN, f64::NAN));
            return Err(OrliczError::InequalityViolation {
                inequality: l.name.clone(),
                a,
                b,
                detail: format!("{} of {} comparisons fail; worst excess {:e}", l.violations, l.checked, l.worst_excess),
            });
        }
    }
    Ok(HInequalityReport { p_minus: pm, p_plus: pp, lines })
}
