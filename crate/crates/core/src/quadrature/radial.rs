//! One-dimensional radial modulars.

use serde::{Deserialize, Serialize};

use crate::numerics::{integrate, integrate_breaks};
use crate::orlicz::OrliczFunction;

use super::probe::{origin_ladder, Ladder};
use super::{sphere_measure, weighted_seminorm_on, QuadError, QuadratureOutcome, QuadratureSpec, RadialProfile, SeminormParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogCase {
    AtOrigin,
    AtInfinity,
}

/// Panel boundaries: `lo`, the breakpoints strictly inside, `hi`.
pub(crate) fn panels(lo: f64, hi: f64, breaks: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo];
    pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `int_lo^hi f`, running the origin ladder when `lo == 0`.
pub(crate) fn radial_outcome<F>(f: F, lo: f64, hi: f64, breaks: &[f64], q: &QuadratureSpec) -> Result<QuadratureOutcome, QuadError>
where
    F: Fn(f64) -> f64,
{
    if !(hi > lo) {
        return Ok(QuadratureOutcome::converged(0.0, 0.0));
    }
    let tol = q.tol(1e-2);
    if lo > 0.0 {
        let r = integrate_breaks(&f, &panels(lo, hi, breaks), tol);
        return finish(q, r.value, r.error, "radial integral");
    }
    let pts = panels(0.0, hi, breaks);
    let r0 = 0.5 * pts[1];
    let mut outer = vec![r0];
    outer.extend_from_slice(&pts[1..]);
    let main = integrate_breaks(&f, &outer, tol);
    match origin_ladder(|a, b| integrate(&f, a, b, tol), r0, main.value, q) {
        Ladder::Converged { value, error, .. } => finish(q, main.value + value, main.error + error, "radial integral"),
        Ladder::Divergent { model, partials, cutoffs, r2 } => {
            Ok(QuadratureOutcome::Divergent { growth_model: model, partial_values: partials, cutoffs, r2 })
        }
        Ladder::Undecided { value, error, detail } => Err(QuadError::DepthExceeded { value: main.value + value, error, detail }),
    }
}

pub(crate) fn finish(q: &QuadratureSpec, value: f64, error: f64, what: &str) -> Result<QuadratureOutcome, QuadError> {
    if value.is_finite() && q.accepts(value, error) {
        Ok(QuadratureOutcome::converged(value, error))
    } else {
        Err(QuadError::DepthExceeded { value, error, detail: format!("{what} did not reach tolerance") })
    }
}

#[inline]
fn rpow(r: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        r.powf(e)
    }
}

/// `int_{R^N} Phi(|u| / |x|^gamma) dx`.
pub fn modular_lhs(phi: &OrliczFunction, p: &SeminormParams, u: &RadialProfile, q: &QuadratureSpec) -> Result<QuadratureOutcome, QuadError> {
    q.validate()?;
    if u.is_zero() {
        return Ok(QuadratureOutcome::converged(0.0, 0.0));
    }
    let (n, gamma) = (p.n, p.gamma());
    let w = sphere_measure(n - 1);
    let (lo, hi) = u.support();
    radial_outcome(
        |r| w * phi.value(u.g(r).abs() * rpow(r, -gamma)) * rpow(r, (n - 1) as f64),
        lo,
        hi,
        u.breakpoints(),
        q,
    )
}

/// Hardy integrand divided by `log(2R/|x|)^e` (at the origin) or
/// `log(2|x|/R)^e` (at infinity).
#[allow(clippy::too_many_arguments)]
pub fn log_modular(
    phi: &OrliczFunction,
    case: LogCase,
    exponent: f64,
    radius: f64,
    p: &SeminormParams,
    u: &RadialProfile,
    q: &QuadratureSpec,
) -> Result<QuadratureOutcome, QuadError> {
    q.validate()?;
    if !(radius > 0.0) {
        return Err(QuadError::InvalidParams(format!("R must be positive, got {radius}")));
    }
    if u.is_zero() {
        return Ok(QuadratureOutcome::converged(0.0, 0.0));
    }
    let (lo, hi) = u.support();
    match case {
        LogCase::AtOrigin if hi > radius => {
            return Err(QuadError::SupportViolation(format!("support [{lo}, {hi}] not inside the ball of radius {radius}")))
        }
        LogCase::AtInfinity if lo < radius => {
            return Err(QuadError::SupportViolation(format!("support [{lo}, {hi}] meets the ball of radius {radius}")))
        }
        _ => {}
    }
    let (n, gamma) = (p.n, p.gamma());
    let w = sphere_measure(n - 1);
    let two_r = 2.0 * radius;
    radial_outcome(
        |r| {
            let l = match case {
                LogCase::AtOrigin => (two_r / r).ln(),
                LogCase::AtInfinity => (2.0 * r / radius).ln(),
            };
            w * phi.value(u.g(r).abs() * rpow(r, -gamma)) * rpow(r, (n - 1) as f64) / l.powf(exponent)
        },
        lo,
        hi,
        u.breakpoints(),
        q,
    )
}

/// `int_{R^N} Phi(|x|^alpha |grad u|) dx`.
pub fn gradient_modular(
    phi: &OrliczFunction,
    alpha: f64,
    n: usize,
    u: &RadialProfile,
    q: &QuadratureSpec,
) -> Result<QuadratureOutcome, QuadError> {
    q.validate()?;
    if !(1..=3).contains(&n) {
        return Err(QuadError::InvalidParams(format!("dimension must be 1, 2 or 3, got {n}")));
    }
    if u.is_zero() {
        return Ok(QuadratureOutcome::converged(0.0, 0.0));
    }
    let w = sphere_measure(n - 1);
    let (lo, hi) = u.support();
    let out = radial_outcome(
        |r| w * phi.value(rpow(r, alpha) * u.g_prime(r).abs()) * rpow(r, (n - 1) as f64),
        lo,
        hi,
        u.breakpoints(),
        q,
    )?;
    match out {
        QuadratureOutcome::Divergent { growth_model, r2, .. } => Err(QuadError::OriginSingular { model: growth_model, r2 }),
        c => Ok(c),
    }
}

/// Mean of `u` over the annulus `2^k R <= |x| < 2^{k+1} R`.
pub fn annulus_average(u: &RadialProfile, k: i32, radius: f64, n: usize, q: &QuadratureSpec) -> f64 {
    let a = 2f64.powi(k) * radius;
    let b = 2.0 * a;
    let nf = n as f64;
    let r = integrate_breaks(|r| u.g(r) * rpow(r, nf - 1.0), &panels(a, b, u.breakpoints()), q.tol(1e-3));
    nf * r.value / (b.powf(nf) - a.powf(nf))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincarePair {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
}

impl PoincarePair {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// For `u_lam(x) = u(x/lam)` on `A_k(lam R)`: the oscillation modular
/// `int Phi(|u_lam - mean|)` and the matching seminorm with the difference
/// quotient scaled by `lam^s` (`s == 1`: `int Phi(lam |grad u_lam|)`).
#[allow(clippy::too_many_arguments)]
pub fn poincare_pair(
    phi: &OrliczFunction,
    u: &RadialProfile,
    annulus: (i32, f64),
    lambda: f64,
    s: f64,
    n: usize,
    q: &QuadratureSpec,
) -> Result<PoincarePair, QuadError> {
    q.validate()?;
    let (k, radius) = annulus;
    if !(lambda > 0.0 && radius > 0.0) {
        return Err(QuadError::InvalidParams("lambda and R must be positive".into()));
    }
    let ul = u.dilated(lambda)?;
    let rl = lambda * radius;
    let a = 2f64.powi(k) * rl;
    let b = 2.0 * a;
    let mean = annulus_average(&ul, k, rl, n, q);
    let w = sphere_measure(n - 1);
    let nm1 = (n - 1) as f64;
    let lhs = integrate_breaks(
        |r| w * phi.value((ul.g(r) - mean).abs()) * rpow(r, nm1),
        &panels(a, b, ul.breakpoints()),
        q.tol(1e-2),
    );
    let lhs = finish(q, lhs.value, lhs.error, "oscillation modular")?;
    let rhs = if s == 1.0 {
        let r = integrate_breaks(
            |r| w * phi.value(lambda * ul.g_prime(r).abs()) * rpow(r, nm1),
            &panels(a, b, ul.breakpoints()),
            q.tol(1e-2),
        );
        finish(q, r.value, r.error, "gradient modular")?
    } else {
        let p = SeminormParams::new(n, s, 0.0, 0.0)?;
        weighted_seminorm_on(phi, &p, &ul, (a, b), lambda.powf(s), q)?
    };
    Ok(PoincarePair {
        lambda,
        lhs: lhs.value().unwrap_or(f64::NAN),
        rhs: rhs.value().unwrap_or(f64::NAN),
        lhs_error: lhs.error_estimate().unwrap_or(f64::NAN),
        rhs_error: rhs.error_estimate().unwrap_or(f64::NAN),
    })
}
