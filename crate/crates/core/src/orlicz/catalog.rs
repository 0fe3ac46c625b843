//! Closed-form index data for a handful of standard Orlicz functions.
//!
//! | Phi                  | p- = p⊖ | p+ = p⊕ |
//! |----------------------|---------|---------|
//! | t^p                  | p       | p       |
//! | t^p + t^q, q > p > 1 | p       | q       |
//! | max(t^p, t^q)        | p       | q       |
//! | t^p ln(1+t), p >= 1  | p       | p + 1   |
//! | (1+t) ln(1+t) - t    | 1       | 2       |
//!
//! For all of these both sharp indices are attained at Phi itself. The
//! "bridged quadratic" (t^2 joined to t^2 - 1/9 by a cubic on [1,2]) has
//! p+ = 72/35 but is equivalent to t^2, so its sharp indices are both 2 and
//! are attained at t^2.

use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::{OrliczFunction, PhiSource, PieceSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub name: String,
    pub p_minus: Option<f64>,
    pub p_plus: Option<f64>,
    pub p_ominus: f64,
    pub p_oplus: f64,
    /// p+ of the equivalent function at which p⊖ is attained.
    pub ominus_representative_p_plus: f64,
    /// p- of the equivalent function at which p⊕ is attained.
    pub oplus_representative_p_minus: f64,
}

impl ClosedForm {
    fn attained_at_self(name: String, pm: f64, pp: f64) -> Self {
        Self {
            name,
            p_minus: Some(pm),
            p_plus: Some(pp),
            p_ominus: pm,
            p_oplus: pp,
            ominus_representative_p_plus: pp,
            oplus_representative_p_minus: pm,
        }
    }
}

fn power_of_t(e: &Expr) -> Option<f64> {
    match e {
        Expr::T => Some(1.0),
        Expr::Pow(b, p) if **b == Expr::T => Some(*p),
        _ => None,
    }
}

fn is_ln1p_t(e: &Expr) -> bool {
    matches!(e, Expr::Ln1p(x) if **x == Expr::T)
}

fn is_one_plus_t(e: &Expr) -> bool {
    match e {
        Expr::Add(a, b) => {
            (**a == Expr::Const(1.0) && **b == Expr::T) || (**a == Expr::T && **b == Expr::Const(1.0))
        }
        _ => false,
    }
}

/// Structural match of a parsed expression against the catalog.
pub fn recognize(e: &Expr) -> Option<ClosedForm> {
    if let Some(p) = power_of_t(e) {
        return (p > 1.0).then(|| ClosedForm::attained_at_self(format!("t^{p}"), p, p));
    }
    match e {
        Expr::Add(a, b) | Expr::Max(a, b) => {
            let (p, q) = (power_of_t(a)?, power_of_t(b)?);
            if p == q || p.min(q) <= 1.0 {
                return None;
            }
            let kind = if matches!(e, Expr::Add(..)) { "sum" } else { "max" };
            Some(ClosedForm::attained_at_self(format!("{kind}(t^{}, t^{})", p.min(q), p.max(q)), p.min(q), p.max(q)))
        }
        Expr::Mul(a, b) => {
            let p = if is_ln1p_t(b) {
                power_of_t(a)?
            } else if is_ln1p_t(a) {
                power_of_t(b)?
            } else {
                return None;
            };
            (p >= 1.0).then(|| ClosedForm::attained_at_self(format!("t^{p} ln(1+t)"), p, p + 1.0))
        }
        Expr::Sub(a, b) if **b == Expr::T => match &**a {
            Expr::Mul(x, y) if (is_one_plus_t(x) && is_ln1p_t(y)) || (is_one_plus_t(y) && is_ln1p_t(x)) => {
                Some(ClosedForm::attained_at_self("(1+t) ln(1+t) - t".into(), 1.0, 2.0))
            }
            _ => None,
        },
        _ => None,
    }
}

/// The bridged quadratic as piece specifications.
pub fn bridged_quadratic_source() -> PhiSource {
    PhiSource::Piecewise(vec![
        PieceSpec { lo: 0.0, hi: Some(1.0), expr: "t^2".into() },
        PieceSpec { lo: 1.0, hi: Some(2.0), expr: "(2*t^3+12*t-5)/9".into() },
        PieceSpec { lo: 2.0, hi: None, expr: "t^2-1/9".into() },
    ])
}

fn bridged_reference(t: f64) -> f64 {
    if t < 1.0 {
        t * t
    } else if t < 2.0 {
        (2.0 * t * t * t + 12.0 * t - 5.0) / 9.0
    } else {
        t * t - 1.0 / 9.0
    }
}

/// Value-based recognition, used for piecewise definitions.
pub fn recognize_values(f: &OrliczFunction) -> Option<ClosedForm> {
    if f.breakpoints() != [1.0, 2.0] {
        return None;
    }
    let probes = [0.25, 0.5, 1.0, 1.2, 1.5, 1.9, 2.0, 3.0, 10.0, 1e3];
    let same = probes.iter().all(|&t| (f.value(t) - bridged_reference(t)).abs() <= 1e-12 * bridged_reference(t));
    same.then(|| ClosedForm {
        name: "bridged quadratic".into(),
        p_minus: None,
        p_plus: Some(72.0 / 35.0),
        p_ominus: 2.0,
        p_oplus: 2.0,
        ominus_representative_p_plus: 2.0,
        oplus_representative_p_minus: 2.0,
    })
}

/// Convenience constructors for the catalog entries.
pub fn power(p: f64) -> OrliczFunction {
    OrliczFunction::parse(&format!("t^{p}")).expect("t^p with p > 1 is an Orlicz function")
}

pub fn power_sum(p: f64, q: f64) -> OrliczFunction {
    OrliczFunction::parse(&format!("t^{p}+t^{q}")).expect("catalog entry")
}

pub fn power_max(p: f64, q: f64) -> OrliczFunction {
    OrliczFunction::parse(&format!("max(t^{p},t^{q})")).expect("catalog entry")
}

pub fn power_log(p: f64) -> OrliczFunction {
    OrliczFunction::parse(&format!("t^{p}*ln(1+t)")).expect("catalog entry")
}

pub fn entropy_like() -> OrliczFunction {
    OrliczFunction::parse("(1+t)*ln(1+t)-t").expect("catalog entry")
}

pub fn bridged_quadratic() -> OrliczFunction {
    OrliczFunction::from_source(&bridged_quadratic_source()).expect("catalog entry")
}
