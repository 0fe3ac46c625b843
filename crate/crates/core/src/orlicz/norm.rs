//! Luxemburg norm from a modular: inf{lambda > 0 : modular(lambda) <= 1}.

use super::{OrliczError, OrliczFunction, Result};
use crate::numerics::roots::bisect;

/// Largest lambda tried before giving up with `NormInfinite`.
pub const NORM_CAP: f64 = 1e12;
const SMALLEST: f64 = 1e-200;

/// `modular(lambda)` must be non-increasing, typically `lambda -> ∫ Phi(|u|/lambda)`.
/// `phi` is carried for the API's sake (the modular already closes over it).
pub fn luxemburg_norm<F: Fn(f64) -> f64>(_phi: &OrliczFunction, modular: F) -> Result<f64> {
    if modular(SMALLEST) == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while !(modular(hi) <= 1.0) {
        hi *= 2.0;
        if hi > NORM_CAP {
            return Err(OrliczError::NormInfinite { cap: NORM_CAP });
        }
    }
    let mut lo = hi * 0.5;
    while modular(lo) <= 1.0 {
        lo *= 0.5;
        if lo < SMALLEST {
            return Ok(0.0);
        }
    }
    // g(lambda) = 1 - modular(lambda) is non-decreasing.
    Ok(bisect(|lam| 1.0 - modular(lam), lo, hi, 1e-14))
}
