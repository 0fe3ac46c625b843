//! Dyadic bookkeeping: contraction factors, a feasible `Lambda`, and an
//! annulus-by-annulus certificate for the telescoped bound
//! `(1 - C3) sum_k 2^{kN} Phi(2^{-k gamma} |(u)_{A_k}|) <= C1 C2 sum_k coupling_k`.
//!
//! `A_k = {2^k <= |x| < 2^{k+1}}`. `C1` comes from the split-constant estimate
//! at `Lambda`, `C2` is the smallest constant that makes every per-annulus
//! mean-difference estimate hold for the supplied data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lemmas::{estimate_split_constant, SplitGrid};
use crate::numerics::NeumaierSum;
use crate::orlicz::{OrliczError, OrliczFunction};
use crate::quadrature::{annulus_average, weighted_seminorm_on, QuadError, QuadratureSpec, RadialProfile, SeminormParams};

/// Slack on exact index boundaries such as `gamma = N / p+`.
const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Annuli shrinking toward the origin; needs `Lambda 2^{-N} max(2^{gamma p-}, 2^{gamma p+}) < 1`.
    Inner,
    /// Annuli escaping to infinity; needs `Lambda 2^{N - gamma p-} < 1`.
    Outer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusData {
    pub k: i32,
    /// `(u)_{A_k}`; needed for the mean differences behind `C2`.
    pub mean: f64,
    /// `2^{kN} Phi(2^{-k gamma} |(u)_{A_k}|)`.
    pub avg_term: f64,
    /// Seminorm over `A_k x A_k`.
    pub seminorm_term: f64,
    /// Seminorm over `(A_k u A_{k+1})^2`.
    pub coupling_term: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DyadicError {
    #[error("Lambda = {lambda} is infeasible: contraction factor {factor} >= 1")]
    Infeasible { lambda: f64, factor: f64 },
    #[error("certificate failed from k = {from_k}: partial sum {partial:e} exceeds bound {bound:e}")]
    CertificateFailed { from_k: i32, partial: f64, bound: f64 },
    #[error("invalid annulus data: {0}")]
    InvalidData(String),
    #[error(transparent)]
    Orlicz(#[from] OrliczError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// `Lambda 2^{-N} max(2^{gamma p-}, 2^{gamma p+})`.
pub fn contraction_factor(n: usize, gamma: f64, phi: &OrliczFunction, big_lambda: f64) -> f64 {
    let e = (gamma * phi.p_minus()).max(gamma * phi.p_plus());
    big_lambda * 2f64.powf(e - n as f64)
}

/// Midpoint of the admissible interval `(1, upper)`, or `None` when it is
/// empty (including the boundary case, up to a relative `1e-9`).
pub fn feasible_lambda(n: usize, gamma: f64, phi: &OrliczFunction, regime: Regime) -> Option<f64> {
    let nf = n as f64;
    let room = match regime {
        Regime::Inner if gamma > 0.0 => nf - gamma * phi.p_plus(),
        Regime::Inner => nf - gamma * phi.p_minus(),
        Regime::Outer => gamma * phi.p_minus() - nf,
    };
    if !(room > BOUNDARY_TOL * nf) {
        return None;
    }
    Some(0.5 * (1.0 + 2f64.powf(room)))
}

/// Radius `2^{k+1}` just covers the support: the largest `k` with `A_k` meeting it.
fn top_annulus(u: &RadialProfile) -> i32 {
    u.support().1.log2().ceil() as i32 - 1
}

/// Data for `A_k`, `k = k_min ..= top + 1`, where `top` is the last annulus
/// meeting the support and `k_min` is `floor(log2(inner radius))` or
/// `top - depth` when the support reaches the origin.
pub fn annulus_data(
    phi: &OrliczFunction,
    p: &SeminormParams,
    u: &RadialProfile,
    depth: u32,
    q: &QuadratureSpec,
) -> Result<Vec<AnnulusData>, DyadicError> {
    if u.is_zero() {
        return Ok(Vec::new());
    }
    let top = top_annulus(u);
    let lo = u.support().0;
    let k_min = if lo > 0.0 { lo.log2().floor() as i32 } else { top - depth as i32 };
    let gamma = p.gamma();
    let nf = p.n as f64;
    let ks: Vec<i32> = (k_min..=top + 1).collect();
    ks.par_iter()
        .map(|&k| {
            let a = 2f64.powi(k);
            let mean = annulus_average(u, 0, a, p.n, q);
            let avg_term = 2f64.powf(k as f64 * nf) * phi.value(2f64.powf(-k as f64 * gamma) * mean.abs());
            let seminorm_term = value_of(weighted_seminorm_on(phi, p, u, (a, 2.0 * a), 1.0, q)?);
            let coupling_term = value_of(weighted_seminorm_on(phi, p, u, (a, 4.0 * a), 1.0, q)?);
            Ok(AnnulusData { k, mean, avg_term, seminorm_term, coupling_term })
        })
        .collect()
}

fn value_of(o: crate::quadrature::QuadratureOutcome) -> f64 {
    // Restricted seminorms have no origin ladder, so they always converge.
    o.value().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicCertificate {
    pub lambda: f64,
    pub c3: f64,
    pub c1: f64,
    pub c2: f64,
    /// Split-constant estimate `C(Phi, Lambda)` behind `c1`.
    pub split_c_emp: f64,
    pub lhs_sum: f64,
    pub coupling_sum: f64,
    pub bound: f64,
    /// `bound - lhs_sum`.
    pub margin: f64,
    /// Smallest `bound_m - lhs_m` over the non-trivial suffix sums `k >= m`.
    pub worst_partial_margin: f64,
    pub annuli: usize,
}

/// Check the telescoped bound on every suffix sum `k >= m` of `data`, which
/// must list consecutive annuli with `u = 0` beyond the last one.
pub fn dyadic_certificate(
    data: &[AnnulusData],
    phi: &OrliczFunction,
    n: usize,
    gamma: f64,
    big_lambda: f64,
) -> Result<DyadicCertificate, DyadicError> {
    let c3 = contraction_factor(n, gamma, phi, big_lambda);
    if !(big_lambda > 1.0 && c3 < 1.0) {
        return Err(DyadicError::Infeasible { lambda: big_lambda, factor: c3 });
    }
    for w in data.windows(2) {
        if w[1].k != w[0].k + 1 {
            return Err(DyadicError::InvalidData(format!("annuli {} and {} are not consecutive", w[0].k, w[1].k)));
        }
    }
    for d in data {
        let terms = [d.mean, d.avg_term, d.seminorm_term, d.coupling_term];
        if terms.iter().any(|t| !t.is_finite()) || d.avg_term < 0.0 || d.seminorm_term < 0.0 || d.coupling_term < 0.0 {
            return Err(DyadicError::InvalidData(format!("annulus {} has a negative or non-finite term", d.k)));
        }
    }

    let split = estimate_split_constant(phi, big_lambda, &SplitGrid::default())?;
    let c1 = split.c_emp * (big_lambda - 1.0).powf(1.0 - phi.p_plus());

    let nf = n as f64;
    let mut c2: f64 = 0.0;
    for (i, d) in data.iter().enumerate() {
        let next = data.get(i + 1).map_or(0.0, |e| e.mean);
        let diff = 2f64.powf(d.k as f64 * nf) * phi.value(2f64.powf(-d.k as f64 * gamma) * (d.mean - next).abs());
        if diff == 0.0 {
            continue;
        }
        if !(d.coupling_term > 0.0) {
            return Err(DyadicError::InvalidData(format!("annulus {}: means differ but the coupling term is zero", d.k)));
        }
        c2 = c2.max(diff / d.coupling_term);
    }

    let factor = c1 * c2 / (1.0 - c3);
    let mut lhs = NeumaierSum::new();
    let mut cpl = NeumaierSum::new();
    let mut worst = f64::INFINITY;
    for d in data.iter().rev() {
        lhs.add(d.avg_term);
        cpl.add(d.coupling_term);
        let bound = factor * cpl.value();
        let partial = lhs.value();
        if partial > bound * (1.0 + BOUNDARY_TOL) + f64::MIN_POSITIVE {
            return Err(DyadicError::CertificateFailed { from_k: d.k, partial, bound });
        }
        if partial > 0.0 || bound > 0.0 {
            worst = worst.min(bound - partial);
        }
    }
    let bound = factor * cpl.value();
    Ok(DyadicCertificate {
        lambda: big_lambda,
        c3,
        c1,
        c2,
        split_c_emp: split.c_emp,
        lhs_sum: lhs.value(),
        coupling_sum: cpl.value(),
        bound,
        margin: bound - lhs.value(),
        worst_partial_margin: if worst.is_finite() { worst } else { 0.0 },
        annuli: data.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::catalog;

    #[test]
    fn contraction_examples() {
        let t2 = catalog::power(2.0);
        let f = contraction_factor(1, 0.4, &t2, 1.1);
        assert!((f - 1.1 * 2f64.powf(-0.2)).abs() < 1e-12);
        assert!((contraction_factor(2, 0.0, &t2, 1.3) - 1.3 / 4.0).abs() < 1e-15);
        assert!((contraction_factor(1, 0.5, &t2, 1.0 + 1e-12) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn contraction_is_monotone() {
        let phi = catalog::power_sum(2.0, 3.0);
        let mut prev = 0.0;
        for i in 0..20 {
            let g = 0.05 * i as f64;
            let f = contraction_factor(1, g, &phi, 1.2);
            assert!(f >= prev);
            prev = f;
        }
        assert!(contraction_factor(1, 0.2, &phi, 1.3) > contraction_factor(1, 0.2, &phi, 1.2));
    }

    #[test]
    fn feasible_lambda_examples() {
        let t2 = catalog::power(2.0);
        let l = feasible_lambda(1, 0.4, &t2, Regime::Inner).unwrap();
        assert!(l > 1.0 && l < 2f64.powf(0.2));
        assert!(contraction_factor(1, 0.4, &t2, l) < 1.0);
        assert_eq!(feasible_lambda(1, 0.5, &t2, Regime::Inner), None);
        assert_eq!(feasible_lambda(1, 0.6, &t2, Regime::Inner), None);
        let l = feasible_lambda(1, 1.0, &t2, Regime::Outer).unwrap();
        assert!(l > 1.0 && l < 2.0);
        assert!(l * 2f64.powf(1.0 - 2.0) < 1.0);
        assert_eq!(feasible_lambda(1, 0.5, &t2, Regime::Outer), None);
        // gamma <= 0 uses p-.
        assert!(feasible_lambda(1, -1.0, &catalog::power_sum(2.0, 4.0), Regime::Inner).is_some());
    }

    #[test]
    fn zero_data_holds_trivially() {
        let t2 = catalog::power(2.0);
        let data: Vec<AnnulusData> = (0..3)
            .map(|k| AnnulusData { k, mean: 0.0, avg_term: 0.0, seminorm_term: 0.0, coupling_term: 0.0 })
            .collect();
        let c = dyadic_certificate(&data, &t2, 1, 0.4, 1.05).unwrap();
        assert_eq!(c.bound, 0.0);
        assert_eq!(c.margin, 0.0);
    }

    #[test]
    fn infeasible_lambda_is_rejected() {
        let t2 = catalog::power(2.0);
        assert!(matches!(dyadic_certificate(&[], &t2, 1, 0.4, 1.5), Err(DyadicError::Infeasible { .. })));
        assert!(matches!(dyadic_certificate(&[], &t2, 1, 0.4, 1.0), Err(DyadicError::Infeasible { .. })));
    }

    #[test]
    fn gaps_in_data_are_rejected() {
        let t2 = catalog::power(2.0);
        let d = |k| AnnulusData { k, mean: 0.0, avg_term: 0.0, seminorm_term: 0.0, coupling_term: 0.0 };
        assert!(matches!(dyadic_certificate(&[d(0), d(2)], &t2, 1, 0.4, 1.05), Err(DyadicError::InvalidData(_))));
    }

    #[test]
    fn hat_family_certificate_holds() {
        let t2 = catalog::power(2.0);
        let p = SeminormParams::with_gamma(1, 0.4, 0.4).unwrap();
        let q = QuadratureSpec::default();
        let lam = feasible_lambda(1, 0.4, &t2, Regime::Inner).unwrap();
        for u in [RadialProfile::hat(1.0), RadialProfile::bump(3.0)] {
            let data = annulus_data(&t2, &p, &u, 10, &q).unwrap();
            assert_eq!(data.last().unwrap().mean, 0.0);
            let c = dyadic_certificate(&data, &t2, 1, 0.4, lam).unwrap();
            assert!(c.margin > 0.0 && c.worst_partial_margin > 0.0, "{c:?}");
            // t^2 split constant at Lambda is Lambda itself.
            assert!((c.split_c_emp / lam - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn tampered_data_fails_the_certificate() {
        let t2 = catalog::power(2.0);
        let p = SeminormParams::with_gamma(1, 0.4, 0.4).unwrap();
        let q = QuadratureSpec::default();
        let lam = feasible_lambda(1, 0.4, &t2, Regime::Inner).unwrap();
        let mut data = annulus_data(&t2, &p, &RadialProfile::hat(1.0), 6, &q).unwrap();
        // Inflating an average term without touching its mean breaks the chain.
        let i = data.len() / 2;
        data[i].avg_term *= 1e6;
        assert!(matches!(dyadic_certificate(&data, &t2, 1, 0.4, lam), Err(DyadicError::CertificateFailed { .. })));
    }
}
