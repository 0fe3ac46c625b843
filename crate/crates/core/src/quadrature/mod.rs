//! Modular integrals of radial test functions: the Hardy left side, the
//! weighted fractional seminorm, log-corrected and gradient modulars, annulus
//! averages and Poincare pairs.
//!
//! Everything is reduced to radial coordinates. The surface measure of the
//! unit sphere in R^1 is taken to be 2 (two points).

mod probe;
mod profile;
mod radial;
mod seminorm;
#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

use crate::numerics::Tol;
use crate::orlicz::OrliczError;

pub use profile::{smooth_step, smooth_step_prime, ProfileError, ProfileKind, RadialProfile, Smoothness};
pub use radial::{annulus_average, gradient_modular, log_modular, modular_lhs, poincare_pair, LogCase, PoincarePair};
pub use seminorm::{weighted_seminorm, weighted_seminorm_on};

/// `|S^d|`, the surface measure of the unit sphere in `R^{d+1}`.
pub fn sphere_measure(d: usize) -> f64 {
    use std::f64::consts::PI;
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        _ => {
            // |S^d| = 2 pi^{(d+1)/2} / Gamma((d+1)/2), via the recursion |S^d| = 2 pi |S^{d-2}| / (d-1).
            2.0 * PI * sphere_measure(d - 2) / (d as f64 - 1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormParams {
    pub n: usize,
    /// Fractional order; `s == 1` selects the local (gradient) case.
    pub s: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl SeminormParams {
    pub fn new(n: usize, s: f64, alpha1: f64, alpha2: f64) -> Result<Self, QuadError> {
        if !(1..=3).contains(&n) {
            return Err(QuadError::InvalidParams(format!("dimension must be 1, 2 or 3, got {n}")));
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(QuadError::InvalidParams(format!("s must lie in (0, 1], got {s}")));
        }
        if !(alpha1.is_finite() && alpha2.is_finite()) {
            return Err(QuadError::InvalidParams("alpha must be finite".into()));
        }
        Ok(Self { n, s, alpha1, alpha2 })
    }

    /// Parameters with `alpha2 = 0` and `alpha1` chosen so that `gamma` is as given.
    pub fn with_gamma(n: usize, s: f64, gamma: f64) -> Result<Self, QuadError> {
        Self::new(n, s, s - gamma, 0.0)
    }

    pub fn gamma(&self) -> f64 {
        self.s - self.alpha1 - self.alpha2
    }

    pub fn is_local(&self) -> bool {
        self.s == 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinement_depth: u32,
    /// Width of the near-diagonal band as a fraction of the support diameter.
    pub diagonal_band_width: f64,
    /// Levels of the cutoff ladder `eps_k = 2^{-k}` computed before classifying.
    pub probe_min_levels: usize,
    pub probe_max_levels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            max_refinement_depth: 40,
            diagonal_band_width: 1e-2,
            probe_min_levels: 40,
            probe_max_levels: 1000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(QuadError::InvalidParams("tolerances must be positive".into()));
        }
        if self.max_refinement_depth < 1 || self.probe_min_levels < 20 || self.probe_max_levels < self.probe_min_levels {
            return Err(QuadError::InvalidParams("depth >= 1 and 20 <= probe_min_levels <= probe_max_levels".into()));
        }
        if !(self.diagonal_band_width > 0.0 && self.diagonal_band_width <= 0.5) {
            return Err(QuadError::InvalidParams("diagonal_band_width must lie in (0, 0.5]".into()));
        }
        Ok(())
    }

    pub(crate) fn tol(&self, factor: f64) -> Tol {
        Tol::new(self.abs_tol * factor, self.rel_tol * factor, self.max_refinement_depth)
    }

    pub(crate) fn accepts(&self, value: f64, error: f64) -> bool {
        error <= self.rel_tol * value.abs() + self.abs_tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum GrowthModel {
    Log,
    /// Partial values grow like `eps^exponent` (exponent < 0).
    Power { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum QuadratureOutcome {
    Converged {
        value: f64,
        error_estimate: f64,
    },
    Divergent {
        growth_model: GrowthModel,
        /// Integral truncated at each cutoff radius.
        partial_values: Vec<f64>,
        cutoffs: Vec<f64>,
        /// Goodness of the growth fit over the last ladder levels.
        r2: f64,
    },
}

impl QuadratureOutcome {
    pub fn converged(value: f64, error_estimate: f64) -> Self {
        Self::Converged { value, error_estimate }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Converged { value, .. } => Some(*value),
            Self::Divergent { .. } => None,
        }
    }

    pub fn error_estimate(&self) -> Option<f64> {
        match self {
            Self::Converged { error_estimate, .. } => Some(*error_estimate),
            Self::Divergent { .. } => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, Self::Converged { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Converged { .. } => "converged",
            Self::Divergent { growth_model: GrowthModel::Log, .. } => "divergent-log",
            Self::Divergent { .. } => "divergent-power",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("refinement limit reached: value {value:e} with error {error:e} ({detail})")]
    DepthExceeded { value: f64, error: f64, detail: String },
    #[error("outer tail diverges: alpha = {alpha} >= s = {s} with u nonzero")]
    TailDivergent { alpha: f64, s: f64 },
    #[error("integrand not integrable at the origin ({model:?}, fit R^2 = {r2})")]
    OriginSingular { model: GrowthModel, r2: f64 },
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Orlicz(#[from] OrliczError),
}
