//! Test-function families and end-to-end experiments on the Hardy inequality
//! and its variants. Verdicts are fit-based summaries; every report keeps the
//! raw per-member data.

mod experiments;
#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicError;
use crate::numerics::linear_fit;
use crate::orlicz::{estimate_sharp_indices, OrliczError, OrliczFunction};
use crate::quadrature::{GrowthModel, ProfileError, ProfileKind, QuadError, QuadratureOutcome, RadialProfile, SeminormParams};

pub use experiments::{
    check_local_hardy, check_local_hardy_members, check_log_hardy, failure_witness, hardy_family, hardy_quotient, poincare_scaling,
    run_counterexample, sum_trick_check, sweep_gamma, CounterexampleReport, FailureWitness, LogHardySetup, PoincareScalingReport,
    SumTrickRecord, SumTrickReport,
};

/// Index boundaries closer than this count as equal.
const REGION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LabError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid family: {0}")]
    SpecError(String),
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("expected divergence but the integral converged: {0}")]
    UnexpectedConvergence(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Orlicz(#[from] OrliczError),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
}

impl From<ProfileError> for LabError {
    fn from(e: ProfileError) -> Self {
        LabError::SpecError(e.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FamilySpec {
    Bump { radius: f64 },
    Dilations { base: ProfileKind, lambdas: Vec<f64> },
    CounterexampleGn { ns: Vec<f64> },
    /// Smooth bumps on `[2^k R, 2^{k+1} R]`.
    AnnulusSupported { ks: Vec<i32>, radius: f64 },
    /// Bumps of radius `scale * R`, for `scale <= 1` all inside `B_R`.
    ShrinkToOrigin { radius: f64, scales: Vec<f64> },
    /// `g_n(2R/r)`: the mirror image of `g_n` under inversion, supported in `[R, 2nR]`.
    InvertedGn { ns: Vec<f64>, radius: f64 },
}

/// A family member and the parameter it was generated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub param: f64,
    pub profile: RadialProfile,
}

pub fn make_family(spec: &FamilySpec) -> Result<Vec<Member>, LabError> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(LabError::SpecError(format!("{name} must be positive, got {v}")))
        }
    };
    let members = match spec {
        FamilySpec::Bump { radius } => {
            positive("radius", *radius)?;
            vec![Member { param: *radius, profile: RadialProfile::bump(*radius) }]
        }
        FamilySpec::Dilations { base, lambdas } => {
            let b = RadialProfile::new(base.clone())?;
            if b.is_zero() {
                return Err(LabError::SpecError("dilations of the zero profile".into()));
            }
            lambdas
                .iter()
                .map(|&l| Ok(Member { param: l, profile: b.dilated(l)? }))
                .collect::<Result<_, LabError>>()?
        }
        FamilySpec::CounterexampleGn { ns } => ns
            .iter()
            .map(|&n| Ok(Member { param: n, profile: RadialProfile::new(ProfileKind::CounterexampleGn { n })? }))
            .collect::<Result<_, LabError>>()?,
        FamilySpec::AnnulusSupported { ks, radius } => {
            positive("radius", *radius)?;
            ks.iter()
                .map(|&k| {
                    let lo = 2f64.powi(k) * radius;
                    Ok(Member { param: lo, profile: RadialProfile::new(ProfileKind::AnnulusBump { lo, hi: 2.0 * lo })? })
                })
                .collect::<Result<_, LabError>>()?
        }
        FamilySpec::ShrinkToOrigin { radius, scales } => {
            positive("radius", *radius)?;
            scales
                .iter()
                .map(|&sc| {
                    positive("scale", sc)?;
                    Ok(Member { param: sc, profile: RadialProfile::bump(sc * radius) })
                })
                .collect::<Result<_, LabError>>()?
        }
        FamilySpec::InvertedGn { ns, radius } => ns
            .iter()
            .map(|&n| Ok(Member { param: n, profile: RadialProfile::new(ProfileKind::InvertedGn { n, radius: *radius })? }))
            .collect::<Result<_, LabError>>()?,
    };
    Ok(members)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Holds,
    GreyArea,
    Fails,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Region::Holds => "holds",
            Region::GreyArea => "grey-area",
            Region::Fails => "fails",
        }
    }
}

/// `(p_oplus, p_ominus, attained)`: closed forms from the catalog, otherwise
/// growth-function estimates (never treated as attained).
pub fn sharp_indices(phi: &OrliczFunction) -> Result<(f64, f64, bool), LabError> {
    if let Some(cf) = phi.closed_form() {
        return Ok((cf.p_oplus, cf.p_ominus, true));
    }
    let est = estimate_sharp_indices(phi)?;
    Ok((est.p_oplus_est, est.p_ominus_est, false))
}

/// Theoretical region of `gamma` for the inequality over all of `C_c^1`.
pub fn region_for(n: usize, gamma: f64, p_oplus: f64, p_ominus: f64, attained: bool) -> Region {
    let nf = n as f64;
    let upper = nf / p_ominus;
    if gamma < nf / p_oplus - REGION_TOL {
        Region::Holds
    } else if gamma > upper + REGION_TOL || (attained && gamma >= upper - REGION_TOL) {
        Region::Fails
    } else {
        Region::GreyArea
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientRecord {
    pub member_id: usize,
    pub param: f64,
    pub profile: String,
    pub params: SeminormParams,
    pub lhs: Option<QuadratureOutcome>,
    pub lhs_failure: Option<String>,
    pub rhs: Option<QuadratureOutcome>,
    pub rhs_failure: Option<String>,
    /// `lhs / rhs`, present iff both converged and `rhs > 0`.
    pub quotient: Option<f64>,
}

impl QuotientRecord {
    pub(crate) fn new(
        member_id: usize,
        member: &Member,
        params: SeminormParams,
        lhs: Result<QuadratureOutcome, QuadError>,
        rhs: Result<QuadratureOutcome, QuadError>,
    ) -> Self {
        let split = |r: Result<QuadratureOutcome, QuadError>| match r {
            Ok(o) => (Some(o), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let (lhs, lhs_failure) = split(lhs);
        let (rhs, rhs_failure) = split(rhs);
        let quotient = match (lhs.as_ref().and_then(|o| o.value()), rhs.as_ref().and_then(|o| o.value())) {
            (Some(l), Some(r)) if r > 0.0 => Some(l / r),
            _ => None,
        };
        Self { member_id, param: member.param, profile: member.profile.describe(), params, lhs, lhs_failure, rhs, rhs_failure, quotient }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// `quotient-vs-log-param`, `log-cutoff` or `power-cutoff`.
    pub model: String,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Bounded => "bounded",
            Verdict::Growing => "growing",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub title: String,
    pub gamma: f64,
    pub region: Option<Region>,
    pub records: Vec<QuotientRecord>,
    pub sup_quotient: Option<f64>,
    pub min_quotient: Option<f64>,
    pub growth_fit: Option<GrowthFit>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub(crate) fn assemble(title: String, gamma: f64, region: Option<Region>, records: Vec<QuotientRecord>) -> Self {
        let qs: Vec<f64> = records.iter().filter_map(|r| r.quotient).collect();
        let sup_quotient = qs.iter().copied().reduce(f64::max);
        let min_quotient = qs.iter().copied().reduce(f64::min);
        let (growth_fit, verdict) = assess(&records);
        Self { title, gamma, region, records, sup_quotient, min_quotient, growth_fit, verdict }
    }

    pub fn quotients(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.quotient).collect()
    }
}

/// Growth fit and verdict.
///
/// A divergent left side is fitted along its cutoff ladder. With all
/// quotients finite, `Growing` needs a positive slope against `ln(param)`
/// with `R^2 >= 0.99`, at least 5% total increase, and a second-half slope
/// no smaller than 3/4 of the first-half slope (saturating curves are not
/// growth).
fn assess(records: &[QuotientRecord]) -> (Option<GrowthFit>, Verdict) {
    if let Some(QuadratureOutcome::Divergent { growth_model, partial_values, cutoffs, r2 }) =
        records.iter().filter_map(|r| r.lhs.as_ref()).find(|o| !o.is_converged())
    {
        let xs: Vec<f64> = cutoffs.iter().map(|c| -c.ln()).collect();
        let (model, ys): (&str, Vec<f64>) = match growth_model {
            GrowthModel::Log => ("log-cutoff", partial_values.clone()),
            GrowthModel::Power { .. } => ("power-cutoff", partial_values.iter().map(|v| v.ln()).collect()),
        };
        let m = xs.len().min(16);
        let fit = linear_fit(&xs[xs.len() - m..], &ys[ys.len() - m..]);
        return match fit {
            Some(f) => {
                let g = GrowthFit { model: model.into(), slope: f.slope, intercept: f.intercept, r2: *r2 };
                let v = if f.slope > 0.0 && *r2 >= 0.99 { Verdict::Growing } else { Verdict::Inconclusive };
                (Some(g), v)
            }
            None => (None, Verdict::Inconclusive),
        };
    }
    if records.iter().any(|r| r.quotient.is_none()) {
        return (None, Verdict::Inconclusive);
    }
    let mut pts: Vec<(f64, f64)> = records.iter().map(|r| (r.param.ln(), r.quotient.unwrap())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.len() < 3 || pts.iter().any(|p| !p.0.is_finite()) {
        return (None, Verdict::Bounded);
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let Some(fit) = linear_fit(&xs, &ys) else {
        return (None, Verdict::Bounded);
    };
    let g = GrowthFit { model: "quotient-vs-log-param".into(), slope: fit.slope, intercept: fit.intercept, r2: fit.r2 };
    let first = ys[0];
    let last = ys[ys.len() - 1];
    let half = ys.len() / 2;
    let slope_of = |a: usize, b: usize| (ys[b] - ys[a]) / (xs[b] - xs[a]);
    let sustained = slope_of(half, ys.len() - 1) >= 0.75 * slope_of(0, half);
    let growing = fit.slope > 0.0 && fit.r2 >= 0.99 && last > 1.05 * first && sustained;
    (Some(g), if growing { Verdict::Growing } else { Verdict::Bounded })
}
