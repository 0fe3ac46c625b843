//! Orlicz functions: parsing, evaluation, indices, equivalence, growth
//! functions and Luxemburg norms.
//!
//! An [`OrliczFunction`] is immutable once built. Construction validates the
//! axioms numerically on a log grid and computes the indices `p-`/`p+`, so
//! every value in circulation is known to be a genuine (numerical) Orlicz
//! function.

pub mod catalog;
mod equivalence;
pub mod expr;
mod growth;
mod hineq;
mod indices;
mod norm;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{roots::bisect, LogGrid};
pub use catalog::ClosedForm;
pub use equivalence::{check_equivalence, EquivalenceReport, EquivalenceVerdict, IndexCheck};
pub use expr::{parse_expr, Expr, ParseError};
pub use growth::{estimate_sharp_indices, growth_function, SharpIndexEstimate};
pub use hineq::{check_h_inequalities, HInequalityReport, HLine};
pub use indices::{compute_indices, ArgExtremum, IndexReport};
pub use norm::luxemburg_norm;

/// Which Orlicz axiom failed during validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    ZeroAtOrigin,
    StrictlyIncreasing,
    /// phi must be non-decreasing (convexity of Phi).
    NonDecreasingDerivative,
    /// Phi(t) <= t phi(t) <= Phi(2t).
    DerivativeSandwich,
    /// Phi(t)/t -> 0 as t -> 0+.
    SublinearAtZero,
    /// Phi(t)/t -> inf as t -> inf.
    SuperlinearAtInfinity,
    /// p+ must stay below the configured cap.
    Delta2,
    /// Piecewise pieces must join continuously with non-decreasing phi.
    PiecewiseJoin,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::ZeroAtOrigin => "Phi(0) = 0",
            Axiom::StrictlyIncreasing => "Phi strictly increasing",
            Axiom::NonDecreasingDerivative => "phi non-decreasing",
            Axiom::DerivativeSandwich => "Phi(t) <= t phi(t) <= Phi(2t)",
            Axiom::SublinearAtZero => "Phi(t)/t -> 0 at 0",
            Axiom::SuperlinearAtInfinity => "Phi(t)/t -> inf at inf",
            Axiom::Delta2 => "delta-2 condition (finite p+)",
            Axiom::PiecewiseJoin => "continuous join of pieces",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrliczError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("not an Orlicz function: {axiom} fails at t = {witness:e} ({detail})")]
    NotOrlicz { axiom: Axiom, witness: f64, detail: String },
    #[error("{op}: argument {value} is outside the domain")]
    Domain { op: &'static str, value: f64 },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("log-log fit residual {residual:e} exceeds the cap {cap:e}")]
    Fit { residual: f64, cap: f64 },
    #[error("modular stays above 1 for every lambda up to {cap:e}")]
    NormInfinite { cap: f64 },
    #[error("{inequality} violated at a = {a:e}, b = {b:e}: {detail}")]
    InequalityViolation { inequality: String, a: f64, b: f64, detail: String },
}

pub type Result<T> = std::result::Result<T, OrliczError>;

/// One piece of a piecewise definition; `hi = None` means +infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: Option<f64>,
    pub expr: String,
}

/// Where an Orlicz function comes from: expression text or pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiSource {
    Expr(String),
    Piecewise(Vec<PieceSpec>),
}

impl fmt::Display for PhiSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiSource::Expr(s) => f.write_str(s),
            PhiSource::Piecewise(ps) => {
                let parts: Vec<String> = ps
                    .iter()
                    .map(|p| match p.hi {
                        Some(h) => format!("[{},{}]: {}", p.lo, h, p.expr),
                        None => format!("[{},inf): {}", p.lo, p.expr),
                    })
                    .collect();
                f.write_str(&parts.join("; "))
            }
        }
    }
}

/// Thresholds used by the construction-time axiom checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub grid: LogGrid,
    /// Largest admissible p+.
    pub p_plus_cap: f64,
    /// Require (Phi(lo)/lo) <= small_ratio * Phi(1).
    pub small_ratio: f64,
    /// Require (Phi(hi)/hi) >= large_ratio * Phi(1).
    pub large_ratio: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self { grid: LogGrid::default(), p_plus_cap: 64.0, small_ratio: 0.5, large_ratio: 2.0 }
    }
}

#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    phi: Expr,
    dphi: Expr,
}

#[derive(Debug, Clone)]
enum Repr {
    Closed { phi: Expr, dphi: Expr },
    Piecewise(Vec<Piece>),
}

/// A validated Orlicz function with its right derivative and indices.
#[derive(Debug, Clone)]
pub struct OrliczFunction {
    source: PhiSource,
    repr: Repr,
    closed_form: Option<ClosedForm>,
    indices: IndexReport,
    delta2: f64,
}

impl fmt::Display for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)
    }
}

/// Parse expression text, or piecewise text of the form
/// `[0,1]: t^2; [1,2]: (2*t^3+12*t-5)/9; [2,inf): t^2-1/9`.
pub fn parse_orlicz(src: &str) -> Result<OrliczFunction> {
    OrliczFunction::from_source(&parse_source_text(src)?)
}

/// Turn CLI/config text into a [`PhiSource`] without validating it.
pub fn parse_source_text(src: &str) -> Result<PhiSource> {
    let trimmed = src.trim();
    if !trimmed.starts_with('[') {
        return Ok(PhiSource::Expr(trimmed.to_string()));
    }
    let mut pieces = Vec::new();
    let mut offset = src.len() - src.trim_start().len();
    for chunk in trimmed.split(';') {
        let perr = |msg: &str, at: usize| {
            OrliczError::Parse(ParseError { message: msg.to_string(), position: at, source: src.to_string() })
        };
        let c = chunk.trim_start();
        let lead = chunk.len() - c.len();
        let here = offset + lead;
        offset += chunk.len() + 1;
        if c.trim().is_empty() {
            continue;
        }
        let Some(colon) = c.find(':') else {
            return Err(perr("expected ':' after the interval", here));
        };
        let head = c[..colon].trim();
        let body = c[colon + 1..].trim();
        if !head.starts_with('[') || !(head.ends_with(']') || head.ends_with(')')) {
            return Err(perr("expected an interval like [lo,hi]", here));
        }
        let inner = &head[1..head.len() - 1];
        let Some((a, bnd)) = inner.split_once(',') else {
            return Err(perr("expected ',' inside the interval", here));
        };
        let lo: f64 = a.trim().parse().map_err(|_| perr("malformed lower bound", here))?;
        let hi = match bnd.trim() {
            "inf" | "infinity" | "oo" => None,
            h => Some(h.parse::<f64>().map_err(|_| perr("malformed upper bound", here))?),
        };
        pieces.push(PieceSpec { lo, hi, expr: body.to_string() });
    }
    Ok(PhiSource::Piecewise(pieces))
}

impl OrliczFunction {
    pub fn parse(src: &str) -> Result<Self> {
        parse_orlicz(src)
    }

    pub fn from_source(src: &PhiSource) -> Result<Self> {
        Self::from_source_with(src, &ValidationConfig::default())
    }

    pub fn from_source_with(src: &PhiSource, cfg: &ValidationConfig) -> Result<Self> {
        let repr = match src {
            PhiSource::Expr(s) => {
                let phi = parse_expr(s)?;
                let dphi = phi.derivative();
                Repr::Closed { phi, dphi }
            }
            PhiSource::Piecewise(specs) => Repr::Piecewise(build_pieces(specs)?),
        };
        let closed_form = match &repr {
            Repr::Closed { phi, .. } => catalog::recognize(phi),
            Repr::Piecewise(_) => None,
        };
        let mut f = OrliczFunction {
            source: src.clone(),
            repr,
            closed_form,
            indices: IndexReport::placeholder(),
            delta2: f64::NAN,
        };
        f.validate(cfg)?;
        if f.closed_form.is_none() {
            f.closed_form = catalog::recognize_values(&f);
        }
        Ok(f)
    }

    pub fn source(&self) -> &PhiSource {
        &self.source
    }

    /// Phi(t) without domain checks (NaN for t < 0).
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        if t < 0.0 {
            return f64::NAN;
        }
        match &self.repr {
            Repr::Closed { phi, .. } => phi.eval(t),
            Repr::Piecewise(ps) => piece_at(ps, t).phi.eval(t),
        }
    }

    /// Right derivative phi(t) without domain checks.
    #[inline]
    pub fn deriv(&self, t: f64) -> f64 {
        if t < 0.0 {
            return f64::NAN;
        }
        match &self.repr {
            Repr::Closed { dphi, .. } => dphi.eval(t),
            Repr::Piecewise(ps) => piece_at(ps, t).dphi.eval(t),
        }
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(OrliczError::Domain { op: "evaluate", value: t });
        }
        Ok(self.value(t))
    }

    pub fn right_derivative(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(OrliczError::Domain { op: "right_derivative", value: t });
        }
        Ok(self.deriv(t))
    }

    /// t phi(t) / Phi(t).
    pub fn index_ratio(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(OrliczError::Domain { op: "index_ratio", value: t });
        }
        Ok(self.ratio(t))
    }

    #[inline]
    pub(crate) fn ratio(&self, t: f64) -> f64 {
        t * self.deriv(t) / self.value(t)
    }

    /// Phi^{-1}(y) by bracketing and bisection; the result satisfies
    /// |Phi(t) - y| <= 1e-12 max(1, y) (in practice to a few ulps).
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(OrliczError::Domain { op: "inverse", value: y });
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if y.is_infinite() {
            return Ok(f64::INFINITY);
        }
        let mut hi = 1.0;
        while self.value(hi) < y {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(OrliczError::Domain { op: "inverse", value: y });
            }
        }
        let mut lo = hi * 0.5;
        while self.value(lo) > y {
            lo *= 0.5;
            if lo < 1e-300 {
                return Ok(0.0);
            }
        }
        Ok(bisect(|t| self.value(t) - y, lo, hi.max(2.0 * lo), 4.0 * f64::EPSILON))
    }

    pub fn indices(&self) -> &IndexReport {
        &self.indices
    }

    pub fn p_minus(&self) -> f64 {
        self.indices.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.indices.p_plus
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    /// Empirical delta-2 constant sup Phi(2t)/Phi(t) over the validation grid.
    pub fn delta2_constant(&self) -> f64 {
        self.delta2
    }

    /// Breakpoints of a piecewise definition (empty for closed forms).
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Closed { .. } => Vec::new(),
            Repr::Piecewise(ps) => ps.iter().skip(1).map(|p| p.lo).collect(),
        }
    }

    /// Left limit of phi at `t`; differs from `deriv` only at piece joins.
    pub(crate) fn deriv_left(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Closed { dphi, .. } => dphi.eval(t),
            Repr::Piecewise(ps) => {
                let p = ps.iter().rev().find(|p| p.lo < t).unwrap_or(&ps[0]);
                p.dphi.eval(t)
            }
        }
    }

    fn not_orlicz(axiom: Axiom, witness: f64, detail: impl Into<String>) -> OrliczError {
        OrliczError::NotOrlicz { axiom, witness, detail: detail.into() }
    }

    fn validate(&mut self, cfg: &ValidationConfig) -> Result<()> {
        let z = self.value(0.0);
        if z.abs() > 1e-300 || !z.is_finite() {
            return Err(Self::not_orlicz(Axiom::ZeroAtOrigin, 0.0, format!("Phi(0) = {z:e}")));
        }
        if let Repr::Piecewise(ps) = &self.repr {
            for w in ps.windows(2) {
                let bpt = w[1].lo;
                let (l, r) = (w[0].phi.eval(bpt), w[1].phi.eval(bpt));
                if (l - r).abs() > 1e-9 * l.abs().max(r.abs()).max(1.0) {
                    return Err(Self::not_orlicz(
                        Axiom::PiecewiseJoin,
                        bpt,
                        format!("Phi jumps from {l} to {r}"),
                    ));
                }
                let (dl, dr) = (w[0].dphi.eval(bpt), w[1].dphi.eval(bpt));
                if dr < dl * (1.0 - 1e-10) {
                    return Err(Self::not_orlicz(
                        Axiom::NonDecreasingDerivative,
                        bpt,
                        format!("phi drops from {dl} to {dr} across the join"),
                    ));
                }
            }
        }
        let pts = cfg.grid.points();
        let mut prev_d = 0.0;
        let mut delta2: f64 = 0.0;
        for &t in &pts {
            let v = self.value(t);
            let d = self.deriv(t);
            if !(v > 0.0 && v.is_finite()) || !(d > 0.0 && d.is_finite()) {
                return Err(Self::not_orlicz(
                    Axiom::StrictlyIncreasing,
                    t,
                    format!("Phi = {v:e}, phi = {d:e}"),
                ));
            }
            if d < prev_d * (1.0 - 1e-10) {
                return Err(Self::not_orlicz(
                    Axiom::NonDecreasingDerivative,
                    t,
                    format!("phi decreases from {prev_d:e} to {d:e}"),
                ));
            }
            prev_d = d;
            let v2 = self.value(2.0 * t);
            let td = t * d;
            // Relative slack covers rounding in Phi itself, which for
            // functions like (1+t)ln(1+t)-t is ~1e-8 near t = 1e-8.
            let slack = 1e-7;
            if v > td * (1.0 + slack) || td > v2 * (1.0 + slack) {
                return Err(Self::not_orlicz(
                    Axiom::DerivativeSandwich,
                    t,
                    format!("Phi = {v:e}, t phi = {td:e}, Phi(2t) = {v2:e}"),
                ));
            }
            delta2 = delta2.max(v2 / v);
        }
        let one = self.value(1.0);
        let (lo, hi) = (cfg.grid.lo, cfg.grid.hi);
        let small = self.value(lo) / lo;
        if !(small <= cfg.small_ratio * one) {
            return Err(Self::not_orlicz(
                Axiom::SublinearAtZero,
                lo,
                format!("Phi(t)/t = {small:e} against Phi(1) = {one:e}"),
            ));
        }
        let large = self.value(hi) / hi;
        if !(large >= cfg.large_ratio * one) {
            return Err(Self::not_orlicz(
                Axiom::SuperlinearAtInfinity,
                hi,
                format!("Phi(t)/t = {large:e} against Phi(1) = {one:e}"),
            ));
        }
        let report = compute_indices(self, &cfg.grid)?;
        if !(report.p_plus <= cfg.p_plus_cap) {
            let w = match report.arg_max {
                ArgExtremum::At(t) => t,
                ArgExtremum::AtLimit(_) => hi,
            };
            return Err(Self::not_orlicz(Axiom::Delta2, w, format!("p+ = {} exceeds {}", report.p_plus, cfg.p_plus_cap)));
        }
        self.indices = report;
        self.delta2 = delta2;
        Ok(())
    }
}

fn piece_at(ps: &[Piece], t: f64) -> &Piece {
    // Pieces are half-open [lo, hi) except the last, so phi is right-continuous.
    ps.iter().find(|p| t >= p.lo && t < p.hi).unwrap_or_else(|| ps.last().unwrap())
}

fn build_pieces(specs: &[PieceSpec]) -> Result<Vec<Piece>> {
    if specs.is_empty() {
        return Err(OrliczError::Validation("piecewise definition has no pieces".into()));
    }
    let mut out = Vec::with_capacity(specs.len());
    let mut expect_lo = 0.0;
    for (i, s) in specs.iter().enumerate() {
        let last = i + 1 == specs.len();
        if s.lo != expect_lo {
            return Err(OrliczError::Validation(format!(
                "piece {i} starts at {} but the previous piece ends at {expect_lo}",
                s.lo
            )));
        }
        let hi = match (s.hi, last) {
            (None, true) => f64::INFINITY,
            (Some(h), false) if h > s.lo => h,
            (None, false) => {
                return Err(OrliczError::Validation(format!("piece {i} is unbounded but not last")))
            }
            (Some(h), true) => {
                return Err(OrliczError::Validation(format!("last piece ends at {h}; pieces must tile [0, inf)")))
            }
            (Some(h), false) => {
                return Err(OrliczError::Validation(format!("piece {i} is empty: [{}, {h}]", s.lo)))
            }
        };
        let phi = parse_expr(&s.expr)?;
        let dphi = phi.derivative();
        out.push(Piece { lo: s.lo, hi, phi, dphi });
        expect_lo = hi;
    }
    Ok(out)
}
