//! The weighted fractional seminorm
//! `int int Phi(|x|^a1 |y|^a2 |u(x) - u(y)| / |x-y|^s) dx dy / |x-y|^N`
//! for radial `u`.
//!
//! With `r = |x|`, `rho = |y|` the angular integral collapses into a density
//! `F(r, rho)`: a two-term sum for N = 1, a theta quadrature for N = 2,
//! and for N = 3 an exact change of variables to `w = |x-y|` that leaves the
//! antiderivative of `Phi(z) z^{1/s-1}`, which is tabulated once per call.
//! The plane is split into the square `[0, L]^2` (`L` = outer support radius),
//! integrated as `rho = r + delta` with geometric grading in `delta`, and the
//! strip where one point lies outside the support, integrated in `ln rho`.

use std::f64::consts::PI;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::numerics::{integrate, integrate_breaks, integrate_breaks_batched, Tol};
use crate::orlicz::OrliczFunction;

use super::probe::{origin_ladder, Ladder};
use super::radial::finish;
use super::{QuadError, QuadratureOutcome, QuadratureSpec, RadialProfile, SeminormParams};

/// Levels of geometric grading toward the diagonal.
const GRADING_LEVELS: i32 = 45;

/// Antiderivative `Psi(Z) = int_0^Z Phi(z) z^{1/s - 1} dz`, tabulated on a log grid.
struct PsiTable<'a> {
    phi: &'a OrliczFunction,
    inv_s: f64,
    v0: f64,
    h: f64,
    cum: Vec<f64>,
}

impl<'a> PsiTable<'a> {
    fn new(phi: &'a OrliczFunction, s: f64) -> Self {
        let h = std::f64::consts::LN_10 / 8.0;
        let v0 = -60.0 * std::f64::consts::LN_10;
        let mut t = Self { phi, inv_s: 1.0 / s, v0, h, cum: Vec::new() };
        let mut acc = t.segment(v0 - 60.0, v0);
        t.cum.push(acc);
        for i in 0..960 {
            let a = v0 + i as f64 * h;
            acc += t.segment(a, a + h);
            if !acc.is_finite() {
                break;
            }
            t.cum.push(acc);
        }
        t
    }

    /// `int Phi(z) z^{1/s - 1} dz` over `z in [e^a, e^b]`, in the variable `v = ln z`.
    fn segment(&self, a: f64, b: f64) -> f64 {
        let f = |v: f64| {
            let z = v.exp();
            self.phi.value(z) * (v * self.inv_s).exp()
        };
        integrate(f, a, b, Tol::new(0.0, 1e-13, 30)).value
    }

    fn psi(&self, z: f64) -> f64 {
        if !(z > 0.0) {
            return 0.0;
        }
        let v = z.ln();
        if v <= self.v0 {
            return self.segment(v - 60.0, v);
        }
        let i = (((v - self.v0) / self.h) as usize).min(self.cum.len() - 1);
        self.cum[i] + self.segment(self.v0 + i as f64 * self.h, v)
    }

    /// `Psi(hi) - Psi(lo)`.
    fn diff(&self, hi: f64, lo: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        if lo > 0.0 && hi < 4.0 * lo {
            self.segment(lo.ln(), hi.ln())
        } else {
            self.psi(hi) - self.psi(lo)
        }
    }
}

struct Kernel<'a> {
    phi: &'a OrliczFunction,
    n: usize,
    s: f64,
    a1: f64,
    a2: f64,
    scale: f64,
    psi: Option<PsiTable<'a>>,
    theta_tol: Tol,
    decay: f64,
}

#[inline]
fn rpow(r: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        r.powf(e)
    }
}

impl<'a> Kernel<'a> {
    fn new(phi: &'a OrliczFunction, p: &SeminormParams, scale: f64, q: &QuadratureSpec) -> Self {
        Self {
            phi,
            n: p.n,
            s: p.s,
            a1: p.alpha1,
            a2: p.alpha2,
            scale,
            psi: (p.n == 3).then(|| PsiTable::new(phi, p.s)),
            theta_tol: Tol::new(0.0, q.rel_tol * 0.1, q.max_refinement_depth),
            decay: 1.0 + p.s * phi.p_minus(),
        }
    }

    /// Density in `(|x|, |y|) = (r, rho)` given `dg = |g(r) - g(rho)|`.
    #[inline]
    fn density(&self, r: f64, rho: f64, dg: f64) -> f64 {
        if dg == 0.0 {
            return 0.0;
        }
        let c = self.scale * rpow(r, self.a1) * rpow(rho, self.a2) * dg;
        let near = (r - rho).abs();
        let far = r + rho;
        match self.n {
            1 => 2.0 * (self.k1(c, near) + self.k1(c, far)),
            2 => 4.0 * PI * r * rho * self.theta2(c, r, rho, near),
            _ => 8.0 * PI * PI * r * rho * self.j3(c, near, far),
        }
    }

    #[inline]
    fn k1(&self, c: f64, w: f64) -> f64 {
        self.phi.value(c * w.powf(-self.s)) / w
    }

    /// `int_0^pi Phi(c w^{-s}) w^{-2} dtheta` with `w^2 = near^2 + 4 r rho sin^2(theta/2)`.
    /// In `theta = theta0 sinh x` the peak of width `theta0` at 0 and the
    /// power decay beyond it both become smooth in `x`.
    fn theta2(&self, c: f64, r: f64, rho: f64, near: f64) -> f64 {
        let rr = 4.0 * r * rho;
        let theta0 = (near / (r * rho).sqrt()).max(1e-15);
        let f = |x: f64| {
            let t = theta0 * x.sinh();
            let sn = (0.5 * t).sin();
            let w2 = near * near + rr * sn * sn;
            self.phi.value(c * w2.powf(-0.5 * self.s)) / w2 * theta0 * x.cosh()
        };
        let x_max = (PI / theta0).asinh();
        let m = (x_max / 3.0).ceil().max(1.0) as usize;
        let w = x_max / m as f64;
        // Past theta0 the integrand decays at least like exp(-decay x), so the
        // remaining tail after a panel worth v is below v / (exp(decay w) - 1).
        let mut sum = 0.0;
        for i in 0..m {
            let v = integrate(f, w * i as f64, w * (i + 1) as f64, self.theta_tol).value;
            sum += v;
            if i >= 1 && v / ((self.decay * w).exp() - 1.0) <= 1e-3 * self.theta_tol.rel * sum {
                break;
            }
        }
        sum
    }

    /// `int_near^far Phi(c w^{-s}) w^{-2} dw`.
    fn j3(&self, c: f64, near: f64, far: f64) -> f64 {
        let psi = self.psi.as_ref().expect("table for N = 3");
        let hi = c * near.powf(-self.s);
        let lo = c * far.powf(-self.s);
        let d = psi.diff(hi, lo);
        if !(d > 0.0) {
            return 0.0;
        }
        (d.ln() - c.ln() / self.s).exp() / self.s
    }
}

/// Trapezoid integral of inner error estimates over the sampled radii.
fn error_mass(mut pts: Vec<(f64, f64)>) -> f64 {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).map(|w| (w[1].0 - w[0].0) * 0.5 * (w[0].1 + w[1].1)).sum()
}

struct Outer {
    value: f64,
    error: f64,
}

/// Outer integral over `r in [lo, hi]`; the ladder takes over near 0 when
/// the weights are singular there.
fn outer_integral<G>(inner: G, lo: f64, hi: f64, breaks: &[f64], band: f64, probe: bool, q: &QuadratureSpec) -> Result<Outer, QuadError>
where
    G: Fn(f64) -> (f64, f64) + Sync,
{
    let errs = Mutex::new(Vec::new());
    let batch = |xs: &[f64]| -> Vec<f64> {
        let out: Vec<(f64, f64)> = xs.par_iter().map(|&r| inner(r)).collect();
        errs.lock().unwrap().extend(xs.iter().zip(&out).map(|(&r, &(_, e))| (r, e.abs())));
        out.into_iter().map(|(v, _)| v).collect()
    };
    let mut pts = super::radial::panels(lo, hi, breaks);
    for j in 0..30 {
        let x = hi - band * 0.5f64.powi(j);
        if x > lo {
            pts.push(x);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let tol = q.tol(0.25);

    let (value, error) = if probe && lo == 0.0 {
        let r0 = 0.5 * pts[1];
        pts[0] = r0;
        let main = integrate_breaks_batched(batch, &pts, tol);
        match origin_ladder(|a, b| integrate_breaks_batched(batch, &[a, b], q.tol(0.05)), r0, main.value, q) {
            Ladder::Converged { value, error, .. } => (main.value + value, main.error + error),
            Ladder::Divergent { model, r2, .. } => return Err(QuadError::OriginSingular { model, r2 }),
            Ladder::Undecided { value, error, detail } => {
                return Err(QuadError::DepthExceeded { value: main.value + value, error, detail })
            }
        }
    } else {
        let r = integrate_breaks_batched(batch, &pts, tol);
        (r.value, r.error)
    };
    let inner_err = error_mass(errs.into_inner().unwrap());
    Ok(Outer { value, error: error + inner_err })
}

/// Both orderings over the square `[lo, hi]^2`.
fn square_part(k: &Kernel, u: &RadialProfile, lo: f64, hi: f64, probe: bool, q: &QuadratureSpec) -> Result<Outer, QuadError> {
    let band = q.diagonal_band_width * (hi - lo);
    let breaks: Vec<f64> = u.breakpoints().iter().copied().filter(|&b| b > lo && b < hi).collect();
    let p_minus = k.phi.p_minus();
    let expo = (1.0 - k.s) * p_minus;
    let tol = q.tol(0.02);
    let cut = 1e-3 * q.rel_tol;
    let inner = |r: f64| -> (f64, f64) {
        let len = hi - r;
        if !(len > 0.0) {
            return (0.0, 0.0);
        }
        let gr = u.g(r);
        let h = |d: f64| {
            let rho = r + d;
            let dg = (gr - u.g(rho)).abs();
            k.density(r, rho, dg) + k.density(rho, r, dg)
        };
        // Grade toward the diagonal until the power-law remainder below the
        // current level is negligible against the largest level seen.
        let mut pts = vec![];
        let mut scale: f64 = 0.0;
        let mut d_min = band * 0.5f64.powi(GRADING_LEVELS);
        for j in 0..GRADING_LEVELS {
            let d = band * 0.5f64.powi(j);
            if d >= len {
                continue;
            }
            pts.push(d);
            let m = d * h(d);
            scale = scale.max(m);
            if j >= 3 && m <= cut * scale {
                d_min = d;
                break;
            }
        }
        if len > d_min {
            pts.push(d_min);
            pts.extend(breaks.iter().map(|b| b - r).filter(|&d| d > d_min && d < len));
        } else {
            pts.push(0.0);
        }
        pts.push(len);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let res = integrate_breaks(h, &pts, tol);
        // Below d_min the Lipschitz bound makes the integrand ~ d^{(1-s)p- - 1}.
        let rem = if pts[0] > 0.0 {
            let v = pts[0] * h(pts[0]) / expo;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        } else {
            0.0
        };
        (res.value + rem, res.error + rem)
    };
    outer_integral(inner, lo, hi, &breaks, band, probe, q)
}

/// Pairs with exactly one point outside the support radius `l`.
fn tail_part(k: &Kernel, u: &RadialProfile, l: f64, probe: bool, q: &QuadratureSpec) -> Result<Outer, QuadError> {
    let (r_lo, _) = u.support();
    let kappa = (k.s - k.a1.max(k.a2)) * k.phi.p_minus();
    let budget = 1e-2 * q.abs_tol / l;
    let tol = q.tol(0.02);
    let inner = |r: f64| -> (f64, f64) {
        let gr = u.g(r).abs();
        if gr == 0.0 {
            return (0.0, 0.0);
        }
        let f = |rho: f64| k.density(r, rho, gr) + k.density(rho, r, gr);
        let d = (l - r).max(l * 1e-15);
        let mut pts = vec![l];
        let mut e = d;
        while e < l {
            pts.push(l + e);
            e *= 2.0;
        }
        pts.push(2.0 * l);
        let near = integrate_breaks(f, &pts, tol);

        let fv = |v: f64| {
            let rho = v.exp();
            rho * f(rho)
        };
        let v1 = (2.0 * l).ln();
        let f1 = fv(v1);
        if !(f1 > 0.0) {
            return (near.value, near.error);
        }
        let span = ((f1 / (kappa * budget)).ln() / kappa).clamp(std::f64::consts::LN_2, 700.0);
        let m = ((span * kappa).ceil() as usize).clamp(4, 64);
        let vpts: Vec<f64> = (0..=m).map(|i| v1 + span * i as f64 / m as f64).collect();
        let far = integrate_breaks(fv, &vpts, tol);
        let rem = fv(v1 + span) / kappa;
        let rem = if rem.is_finite() { rem } else { 0.0 };
        (near.value + far.value + rem, near.error + far.error + rem)
    };
    let band = q.diagonal_band_width * l;
    outer_integral(inner, r_lo, l, u.breakpoints(), band, probe, q)
}

fn check(phi: &OrliczFunction, p: &SeminormParams, q: &QuadratureSpec) -> Result<(), QuadError> {
    q.validate()?;
    if p.is_local() {
        return Err(QuadError::InvalidParams("s = 1 is the local case; use gradient_modular".into()));
    }
    if !(phi.p_minus() > 0.0) {
        return Err(QuadError::InvalidParams("Phi has no positive lower index".into()));
    }
    Ok(())
}

/// The weighted seminorm over `R^N x R^N`.
pub fn weighted_seminorm(phi: &OrliczFunction, p: &SeminormParams, u: &RadialProfile, q: &QuadratureSpec) -> Result<QuadratureOutcome, QuadError> {
    check(phi, p, q)?;
    if u.is_zero() {
        return Ok(QuadratureOutcome::converged(0.0, 0.0));
    }
    for a in [p.alpha2, p.alpha1] {
        if a >= p.s {
            return Err(QuadError::TailDivergent { alpha: a, s: p.s });
        }
    }
    let k = Kernel::new(phi, p, 1.0, q);
    let l = u.support().1;
    let probe = p.alpha1.min(p.alpha2) < 0.0;
    let sq = square_part(&k, u, 0.0, l, probe, q)?;
    let tail = tail_part(&k, u, l, probe, q)?;
    finish(q, sq.value + tail.value, sq.error + tail.error, "weighted seminorm")
}

/// The seminorm restricted to `Omega x Omega`, `Omega = {lo <= |x| < hi}`
/// with `lo > 0`, and the difference quotient multiplied by `scale`.
pub fn weighted_seminorm_on(
    phi: &OrliczFunction,
    p: &SeminormParams,
    u: &RadialProfile,
    domain: (f64, f64),
    scale: f64,
    q: &QuadratureSpec,
) -> Result<QuadratureOutcome, QuadError> {
    check(phi, p, q)?;
    let (lo, hi) = domain;
    if !(lo > 0.0 && hi > lo) {
        return Err(QuadError::InvalidParams(format!("annular domain needs 0 < lo < hi, got ({lo}, {hi})")));
    }
    if u.is_zero() {
        return Ok(QuadratureOutcome::converged(0.0, 0.0));
    }
    let k = Kernel::new(phi, p, scale, q);
    let sq = square_part(&k, u, lo, hi, false, q)?;
    finish(q, sq.value, sq.error, "restricted seminorm")
}
