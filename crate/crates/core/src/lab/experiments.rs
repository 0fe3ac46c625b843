use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::linear_fit;
use crate::orlicz::catalog::{power, power_sum};
use crate::orlicz::OrliczFunction;
use crate::quadrature::{
    gradient_modular, log_modular, modular_lhs, poincare_pair, weighted_seminorm, GrowthModel, LogCase, PoincarePair, QuadError,
    QuadratureOutcome, QuadratureSpec, RadialProfile, SeminormParams,
};

use super::{make_family, region_for, sharp_indices, FamilySpec, GrowthFit, LabError, Member, QuotientRecord, VerificationReport};

const BOUNDARY_TOL: f64 = 1e-9;

fn nonzero(members: &[Member]) -> Result<(), LabError> {
    match members.iter().position(|m| m.profile.is_zero()) {
        Some(i) => Err(LabError::DegenerateInput(format!("member {i} is identically zero"))),
        None => Ok(()),
    }
}

/// Both sides for every member, in parallel, assembled in member order.
fn evaluate<L, R>(members: &[Member], params: SeminormParams, lhs: L, rhs: R) -> Result<Vec<QuotientRecord>, LabError>
where
    L: Fn(&RadialProfile) -> Result<QuadratureOutcome, QuadError> + Sync,
    R: Fn(&RadialProfile) -> Result<QuadratureOutcome, QuadError> + Sync,
{
    nonzero(members)?;
    Ok(members
        .par_iter()
        .enumerate()
        .map(|(i, m)| QuotientRecord::new(i, m, params, lhs(&m.profile), rhs(&m.profile)))
        .collect())
}

/// Hardy left side over the seminorm for one profile.
pub fn hardy_quotient(phi: &OrliczFunction, p: &SeminormParams, u: &RadialProfile, q: &QuadratureSpec) -> Result<QuotientRecord, LabError> {
    if u.is_zero() {
        return Err(LabError::DegenerateInput("u is identically zero".into()));
    }
    let m = Member { param: 1.0, profile: u.clone() };
    Ok(QuotientRecord::new(0, &m, *p, modular_lhs(phi, p, u, q), weighted_seminorm(phi, p, u, q)))
}

/// Hardy quotients over a family at fixed parameters.
pub fn hardy_family(
    phi: &OrliczFunction,
    p: &SeminormParams,
    members: &[Member],
    q: &QuadratureSpec,
) -> Result<VerificationReport, LabError> {
    let (po, pm, att) = sharp_indices(phi)?;
    let records = evaluate(members, *p, |u| modular_lhs(phi, p, u, q), |u| weighted_seminorm(phi, p, u, q))?;
    let title = format!("hardy gamma={}", p.gamma());
    Ok(VerificationReport::assemble(title, p.gamma(), Some(region_for(p.n, p.gamma(), po, pm, att)), records))
}

/// One report per `gamma`, obtained by moving `alpha1` with `s` and `alpha2` fixed.
pub fn sweep_gamma(
    phi: &OrliczFunction,
    base: &SeminormParams,
    gammas: &[f64],
    family: &FamilySpec,
    q: &QuadratureSpec,
) -> Result<Vec<VerificationReport>, LabError> {
    let members = make_family(family)?;
    gammas
        .iter()
        .map(|&g| {
            let p = SeminormParams::new(base.n, base.s, base.s - g - base.alpha2, base.alpha2)?;
            hardy_family(phi, &p, &members, q)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub p: f64,
    pub q: f64,
    pub report: VerificationReport,
    /// `2 log(n/2)` per member.
    pub lower_bounds: Vec<f64>,
    pub lower_bound_holds: bool,
    /// Largest right side over the median right side.
    pub rhs_sup_over_median: f64,
    /// Quotients non-decreasing (to 1e-6 relative) for `n >= 16`.
    pub monotone_beyond_16: bool,
}

/// `S = t^p + t^q` on `R`, `s = gamma = 1/q`, against the `g_n` family.
pub fn run_counterexample(p: f64, q_exp: f64, ns: &[f64], quad: &QuadratureSpec) -> Result<CounterexampleReport, LabError> {
    if !(q_exp > p && p > 1.0) {
        return Err(LabError::ConfigError(format!("need q > p > 1, got p={p}, q={q_exp}")));
    }
    let phi = power_sum(p, q_exp);
    let params = SeminormParams::new(1, 1.0 / q_exp, 0.0, 0.0)?;
    let members = make_family(&FamilySpec::CounterexampleGn { ns: ns.to_vec() })?;
    let mut report = hardy_family(&phi, &params, &members, quad)?;
    report.title = format!("counterexample p={p} q={q_exp}");

    let lower_bounds: Vec<f64> = ns.iter().map(|n| 2.0 * (n / 2.0).ln()).collect();
    let lower_bound_holds = report
        .records
        .iter()
        .zip(&lower_bounds)
        .all(|(r, b)| r.lhs.as_ref().and_then(|o| o.value()).is_some_and(|v| v - b >= -1e-3));
    let mut rhs: Vec<f64> = report.records.iter().filter_map(|r| r.rhs.as_ref().and_then(|o| o.value())).collect();
    rhs.sort_by(f64::total_cmp);
    let rhs_sup_over_median = if rhs.len() == report.records.len() && !rhs.is_empty() {
        let m = rhs.len();
        let median = if m % 2 == 1 { rhs[m / 2] } else { 0.5 * (rhs[m / 2 - 1] + rhs[m / 2]) };
        rhs[m - 1] / median
    } else {
        f64::NAN
    };
    let mut tail: Vec<(f64, f64)> =
        report.records.iter().filter(|r| r.param >= 16.0).map(|r| (r.param, r.quotient.unwrap_or(f64::NAN))).collect();
    tail.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone_beyond_16 = tail.iter().all(|t| t.1.is_finite()) && tail.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - 1e-6));
    Ok(CounterexampleReport { p, q: q_exp, report, lower_bounds, lower_bound_holds, rhs_sup_over_median, monotone_beyond_16 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogHardySetup {
    pub case: LogCase,
    pub radius: f64,
    pub n: usize,
    pub s: f64,
    /// Overrides the catalog exponent.
    pub exponent: Option<f64>,
}

/// Log-corrected inequality at a critical `gamma`: `N/p_oplus` at the
/// origin, `N/p_ominus` at infinity. Needs a catalog `Phi`.
pub fn check_log_hardy(
    phi: &OrliczFunction,
    setup: &LogHardySetup,
    family: &FamilySpec,
    q: &QuadratureSpec,
) -> Result<VerificationReport, LabError> {
    let cf = phi
        .closed_form()
        .ok_or_else(|| LabError::ConfigError("log-corrected check needs a catalog function with attained indices".into()))?;
    let nf = setup.n as f64;
    let (gamma, default_exp) = match setup.case {
        LogCase::AtOrigin => (nf / cf.p_oplus, cf.p_oplus),
        LogCase::AtInfinity => (nf / cf.p_ominus, cf.ominus_representative_p_plus),
    };
    let exponent = setup.exponent.unwrap_or(default_exp);
    let params = SeminormParams::with_gamma(setup.n, setup.s, gamma)?;
    let members = make_family(family)?;
    check_support(&members, setup.case, setup.radius)?;
    let records = evaluate(
        &members,
        params,
        |u| log_modular(phi, setup.case, exponent, setup.radius, &params, u, q),
        |u| weighted_seminorm(phi, &params, u, q),
    )?;
    let title = format!("log-hardy {:?} gamma={gamma} exponent={exponent}", setup.case);
    Ok(VerificationReport::assemble(title, gamma, None, records))
}

fn check_support(members: &[Member], case: LogCase, radius: f64) -> Result<(), LabError> {
    for (i, m) in members.iter().enumerate() {
        let (lo, hi) = m.profile.support();
        let ok = match case {
            LogCase::AtOrigin => hi <= radius,
            LogCase::AtInfinity => lo >= radius,
        };
        if !ok {
            return Err(LabError::ConfigError(format!(
                "member {i} has support [{lo}, {hi}], incompatible with {case:?} at R={radius}"
            )));
        }
    }
    Ok(())
}

/// Local inequality with weight `|x|^alpha` on the gradient, `gamma = 1 - alpha`.
///
/// Regimes: below `N/p_oplus` and above `N/p_ominus` (members away from the
/// origin) use the plain modular; the two attained boundaries use the log
/// corrections with `R` taken from the family's support.
pub fn check_local_hardy(
    phi: &OrliczFunction,
    alpha: f64,
    n: usize,
    family: &FamilySpec,
    q: &QuadratureSpec,
) -> Result<VerificationReport, LabError> {
    let members = make_family(family)?;
    check_local_hardy_members(phi, alpha, n, &members, q)
}

pub fn check_local_hardy_members(
    phi: &OrliczFunction,
    alpha: f64,
    n: usize,
    members: &[Member],
    q: &QuadratureSpec,
) -> Result<VerificationReport, LabError> {
    nonzero(members)?;
    let params = SeminormParams::new(n, 1.0, alpha, 0.0)?;
    let gamma = params.gamma();
    let nf = n as f64;
    let (po, pm, attained) = sharp_indices(phi)?;
    let (lo_b, hi_b) = (nf / po, nf / pm);
    let rhs = |u: &RadialProfile| gradient_modular(phi, alpha, n, u, q);
    let records = if gamma < lo_b - BOUNDARY_TOL {
        evaluate(members, params, |u| modular_lhs(phi, &params, u, q), rhs)?
    } else if gamma > hi_b + BOUNDARY_TOL {
        if let Some(i) = members.iter().position(|m| !m.profile.away_from_origin()) {
            return Err(LabError::ConfigError(format!("member {i} touches the origin; gamma={gamma} needs support away from 0")));
        }
        evaluate(members, params, |u| modular_lhs(phi, &params, u, q), rhs)?
    } else if attained && (gamma - lo_b).abs() <= BOUNDARY_TOL {
        let radius = members.iter().map(|m| m.profile.support().1).fold(0.0, f64::max);
        evaluate(members, params, |u| log_modular(phi, LogCase::AtOrigin, po, radius, &params, u, q), rhs)?
    } else if attained && (gamma - hi_b).abs() <= BOUNDARY_TOL {
        let cf = phi.closed_form().expect("attained implies catalog");
        let radius = members.iter().map(|m| m.profile.support().0).fold(f64::INFINITY, f64::min);
        if !(radius > 0.0) {
            return Err(LabError::ConfigError("log correction at infinity needs support away from 0".into()));
        }
        let e = cf.ominus_representative_p_plus;
        evaluate(members, params, |u| log_modular(phi, LogCase::AtInfinity, e, radius, &params, u, q), rhs)?
    } else {
        return Err(LabError::ConfigError(format!("gamma={gamma} lies in [{lo_b}, {hi_b}], where no local inequality applies")));
    };
    let region = region_for(n, gamma, po, pm, attained);
    Ok(VerificationReport::assemble(format!("local-hardy alpha={alpha} gamma={gamma}"), gamma, Some(region), records))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub profile: String,
    pub params: SeminormParams,
    pub lhs: QuadratureOutcome,
    pub rhs: QuadratureOutcome,
    pub growth_fit: GrowthFit,
}

/// `u = 1` on the unit ball: the left side must diverge at the origin once
/// `gamma >= N/p_minus`, while the seminorm stays finite.
pub fn failure_witness(phi: &OrliczFunction, p: &SeminormParams, q: &QuadratureSpec) -> Result<FailureWitness, LabError> {
    let gamma = p.gamma();
    if gamma < p.n as f64 / phi.p_minus() - BOUNDARY_TOL {
        return Err(LabError::ConfigError(format!("gamma={gamma} is below N/p- = {}", p.n as f64 / phi.p_minus())));
    }
    let u = RadialProfile::plateau(1.0, 2.0);
    let lhs = modular_lhs(phi, p, &u, q)?;
    let QuadratureOutcome::Divergent { growth_model, partial_values, cutoffs, r2 } = &lhs else {
        return Err(LabError::UnexpectedConvergence(format!("left side converged to {:?} at gamma={gamma}", lhs.value())));
    };
    let xs: Vec<f64> = cutoffs.iter().map(|c| -c.ln()).collect();
    let (model, ys): (&str, Vec<f64>) = match growth_model {
        GrowthModel::Log => ("log-cutoff", partial_values.clone()),
        GrowthModel::Power { .. } => ("power-cutoff", partial_values.iter().map(|v| v.ln()).collect()),
    };
    let m = xs.len().min(16);
    let fit = linear_fit(&xs[xs.len() - m..], &ys[ys.len() - m..])
        .ok_or_else(|| LabError::ConfigError("divergence ladder too short to fit".into()))?;
    let rhs = weighted_seminorm(phi, p, &u, q)?;
    Ok(FailureWitness {
        profile: u.describe(),
        params: *p,
        rhs,
        growth_fit: GrowthFit { model: model.into(), slope: fit.slope, intercept: fit.intercept, r2: *r2 },
        lhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareScalingReport {
    pub k: i32,
    pub radius: f64,
    pub pairs: Vec<PoincarePair>,
    pub ratios: Vec<f64>,
    /// `max ratio / min ratio - 1`.
    pub spread: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn poincare_scaling(
    phi: &OrliczFunction,
    u: &RadialProfile,
    annulus: (i32, f64),
    lambdas: &[f64],
    s: f64,
    n: usize,
    q: &QuadratureSpec,
) -> Result<PoincareScalingReport, LabError> {
    if u.is_zero() {
        return Err(LabError::DegenerateInput("u is identically zero".into()));
    }
    let pairs = lambdas
        .par_iter()
        .map(|&l| poincare_pair(phi, u, annulus, l, s, n, q))
        .collect::<Result<Vec<_>, _>>()?;
    let ratios: Vec<f64> = pairs.iter().map(|p| p.ratio()).collect();
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if ratios.is_empty() { 0.0 } else { hi / lo - 1.0 };
    Ok(PoincareScalingReport { k: annulus.0, radius: annulus.1, pairs, ratios, spread })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumTrickRecord {
    pub member_id: usize,
    pub quotient_sum: f64,
    pub quotient_p: f64,
    pub quotient_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumTrickReport {
    pub records: Vec<SumTrickRecord>,
    /// `max(sup quotient_p, sup quotient_q)`.
    pub bound: f64,
    pub holds: bool,
}

/// For `S = t^p + t^q` both sides are sums of the power sides, so the
/// `S`-quotient is at most the larger of the two power constants.
pub fn sum_trick_check(
    p_exp: f64,
    q_exp: f64,
    params: &SeminormParams,
    members: &[Member],
    q: &QuadratureSpec,
) -> Result<SumTrickReport, LabError> {
    if let Some(i) = members.iter().position(|m| !m.profile.away_from_origin()) {
        return Err(LabError::ConfigError(format!("member {i} touches the origin")));
    }
    let phis = [power_sum(p_exp, q_exp), power(p_exp), power(q_exp)];
    let reps = phis
        .iter()
        .map(|phi| {
            let recs = evaluate(members, *params, |u| modular_lhs(phi, params, u, q), |u| weighted_seminorm(phi, params, u, q))?;
            recs.iter()
                .map(|r| r.quotient.ok_or_else(|| LabError::ConfigError(format!("member {} has no quotient", r.member_id))))
                .collect::<Result<Vec<f64>, LabError>>()
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let bound = reps[1].iter().chain(&reps[2]).copied().fold(0.0, f64::max);
    let records: Vec<SumTrickRecord> = (0..members.len())
        .map(|i| SumTrickRecord { member_id: i, quotient_sum: reps[0][i], quotient_p: reps[1][i], quotient_q: reps[2][i] })
        .collect();
    let holds = records.iter().all(|r| r.quotient_sum <= bound * (1.0 + 1e-6));
    Ok(SumTrickReport { records, bound, holds })
}
