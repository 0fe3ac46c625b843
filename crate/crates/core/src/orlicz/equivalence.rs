//! Two-sided comparability C1 Phi <= Psi <= C2 Phi on a log grid.

use serde::{Deserialize, Serialize};

use super::OrliczFunction;
use crate::numerics::extrap::{end_limit, End};
use crate::numerics::LogGrid;

const RATIO_BOUNDS: (f64, f64) = (1e-6, 1e6);
/// An end limit is trusted only if its self-consistency error is below this
/// (relative); otherwise the ratio is treated as unbounded at that end.
const LIMIT_TRUST: f64 = 1e-3;
const INDEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EquivalenceVerdict {
    Equivalent { c1: f64, c2: f64 },
    NotEquivalent { witness: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexCheck {
    /// p-_Phi <= p+_Psi
    pub phi_minus_le_psi_plus: bool,
    /// p-_Psi <= p+_Phi
    pub psi_minus_le_phi_plus: bool,
}

impl IndexCheck {
    pub fn holds(&self) -> bool {
        self.phi_minus_le_psi_plus && self.psi_minus_le_phi_plus
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub verdict: EquivalenceVerdict,
    pub index_check: IndexCheck,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        matches!(self.verdict, EquivalenceVerdict::Equivalent { .. })
    }
}

pub fn check_equivalence(phi: &OrliczFunction, psi: &OrliczFunction, grid: &LogGrid) -> EquivalenceReport {
    let index_check = IndexCheck {
        phi_minus_le_psi_plus: phi.p_minus() <= psi.p_plus() + INDEX_TOL,
        psi_minus_le_phi_plus: psi.p_minus() <= phi.p_plus() + INDEX_TOL,
    };
    let verdict = verdict(phi, psi, grid);
    EquivalenceReport { verdict, index_check }
}

fn verdict(phi: &OrliczFunction, psi: &OrliczFunction, grid: &LogGrid) -> EquivalenceVerdict {
    let ratio = |t: f64| psi.value(t) / phi.value(t);
    let pts = grid.points();
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    for &t in &pts {
        let r = ratio(t);
        if !(r >= RATIO_BOUNDS.0 && r <= RATIO_BOUNDS.1) {
            return EquivalenceVerdict::NotEquivalent { witness: t };
        }
        c1 = c1.min(r);
        c2 = c2.max(r);
    }
    if c1 == c2 {
        // Identical shapes up to a constant: nothing to extrapolate.
        return EquivalenceVerdict::Equivalent { c1, c2 };
    }
    for (end, t_end) in [(End::Zero, grid.lo), (End::Infinity, grid.hi)] {
        let lim = end_limit(ratio, end);
        let trusted = lim.value.is_finite() && lim.error <= LIMIT_TRUST * lim.value.abs();
        if !trusted || !(lim.value >= RATIO_BOUNDS.0 && lim.value <= RATIO_BOUNDS.1) {
            return EquivalenceVerdict::NotEquivalent { witness: t_end };
        }
        let margin = 1e-12 * lim.value;
        if lim.value < c1 - margin {
            c1 = lim.value;
        }
        if lim.value > c2 + margin {
            c2 = lim.value;
        }
    }
    EquivalenceVerdict::Equivalent { c1, c2 }
}
