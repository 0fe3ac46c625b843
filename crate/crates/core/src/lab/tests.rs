use super::*;
use crate::orlicz::catalog::{power, power_sum};
use crate::quadrature::{GrowthModel, LogCase, QuadratureSpec};

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn geometric(start: f64, ratio: f64, len: usize) -> Vec<f64> {
    (0..len).map(|i| start * ratio.powi(i as i32)).collect()
}

#[test]
fn gn_family_follows_the_piecewise_table() {
    let fam = make_family(&FamilySpec::CounterexampleGn { ns: vec![4.0] }).unwrap();
    let g = &fam[0].profile;
    let e1 = (-1.0f64).exp();
    assert_eq!(g.support(), (0.25, 2.0));
    assert_eq!(g.g(0.1), 0.0);
    assert!((g.g(0.375) - e1).abs() < 1e-15);
    assert_eq!(g.g(0.75), 1.0);
    assert!((g.g(1.5) - e1).abs() < 1e-15);
    assert_eq!(g.g(2.5), 0.0);
}

#[test]
fn simple_families() {
    let b = make_family(&FamilySpec::Bump { radius: 1.0 }).unwrap();
    assert_eq!(b[0].profile.support(), (0.0, 1.0));
    assert_eq!(b[0].profile.g(0.0), 1.0);
    let d = make_family(&FamilySpec::Dilations { base: ProfileKind::Hat { radius: 1.0 }, lambdas: vec![2.0] }).unwrap();
    assert_eq!(d[0].profile.support().1, 2.0);
    assert!((d[0].profile.g(1.0) - 0.5).abs() < 1e-15);
    let a = make_family(&FamilySpec::AnnulusSupported { ks: vec![0, 2], radius: 1.0 }).unwrap();
    assert_eq!(a[1].profile.support(), (4.0, 8.0));
    let inv = make_family(&FamilySpec::InvertedGn { ns: vec![8.0], radius: 1.0 }).unwrap();
    assert_eq!(inv[0].profile.support(), (1.0, 16.0));
}

#[test]
fn bad_family_specs() {
    assert!(matches!(make_family(&FamilySpec::Bump { radius: -1.0 }), Err(LabError::SpecError(_))));
    assert!(matches!(make_family(&FamilySpec::CounterexampleGn { ns: vec![1.0] }), Err(LabError::SpecError(_))));
    assert!(matches!(
        make_family(&FamilySpec::Dilations { base: ProfileKind::Zero, lambdas: vec![1.0] }),
        Err(LabError::SpecError(_))
    ));
}

#[test]
fn region_annotation() {
    // t^2: p_oplus = p_ominus = 2, attained.
    assert_eq!(region_for(1, 0.45, 2.0, 2.0, true), Region::Holds);
    assert_eq!(region_for(1, 0.5, 2.0, 2.0, true), Region::Fails);
    assert_eq!(region_for(1, 0.5, 2.0, 2.0, false), Region::GreyArea);
    // t^2 + t^4 in R^1: holds below 1/4, fails from 1/2.
    assert_eq!(region_for(1, 0.3, 4.0, 2.0, true), Region::GreyArea);
    assert_eq!(region_for(1, 0.6, 4.0, 2.0, true), Region::Fails);
}

#[test]
fn zero_profile_is_degenerate() {
    let p = SeminormParams::new(1, 0.4, 0.0, 0.0).unwrap();
    let r = hardy_quotient(&power(2.0), &p, &RadialProfile::zero(), &quad());
    assert!(matches!(r, Err(LabError::DegenerateInput(_))));
}

#[test]
fn quotient_is_dilation_stable_below_the_threshold() {
    let phi = power(2.0);
    let p = SeminormParams::new(1, 0.4, 0.0, 0.0).unwrap();
    let q = quad();
    let a = hardy_quotient(&phi, &p, &RadialProfile::bump(1.0), &q).unwrap().quotient.unwrap();
    let b = hardy_quotient(&phi, &p, &RadialProfile::bump(3.0), &q).unwrap().quotient.unwrap();
    assert!((a - b).abs() <= 2.0 * q.rel_tol * a, "{a} vs {b}");
}

#[test]
fn quotient_absent_when_the_left_side_diverges() {
    let p = SeminormParams::new(1, 0.6, 0.0, 0.0).unwrap();
    let r = hardy_quotient(&power(2.0), &p, &RadialProfile::bump(1.0), &quad()).unwrap();
    match r.lhs {
        Some(QuadratureOutcome::Divergent { growth_model: GrowthModel::Power { exponent }, .. }) => {
            assert!((exponent + 0.2).abs() < 1e-3, "{exponent}")
        }
        ref other => panic!("{other:?}"),
    }
    assert!(r.quotient.is_none());
}

#[test]
fn sweep_below_threshold_is_bounded() {
    let base = SeminormParams::new(1, 0.5, 0.0, 0.0).unwrap();
    let fam = FamilySpec::Dilations { base: ProfileKind::Bump { radius: 1.0 }, lambdas: vec![0.5, 1.0, 2.0, 4.0] };
    let reps = sweep_gamma(&power(2.0), &base, &[0.3, 0.4, 0.45], &fam, &quad()).unwrap();
    assert_eq!(reps.len(), 3);
    for r in &reps {
        assert_eq!(r.verdict, Verdict::Bounded, "{r:?}");
        assert_eq!(r.region, Some(Region::Holds));
        assert_eq!(r.records.len(), 4);
        assert!(r.records.iter().all(|x| (x.params.s - x.params.alpha1 - x.params.alpha2 - r.gamma).abs() < 1e-15));
    }
    assert!(sweep_gamma(&power(2.0), &base, &[], &fam, &quad()).unwrap().is_empty());
}

#[test]
fn doubling_the_dilation_family_keeps_the_sup() {
    let p = SeminormParams::new(1, 0.4, 0.1, 0.0).unwrap();
    let phi = power(2.0);
    let small = make_family(&FamilySpec::Dilations { base: ProfileKind::Hat { radius: 1.0 }, lambdas: geometric(0.5, 2.0, 3) }).unwrap();
    let big = make_family(&FamilySpec::Dilations { base: ProfileKind::Hat { radius: 1.0 }, lambdas: geometric(0.5, 2f64.sqrt(), 6) })
        .unwrap();
    let a = hardy_family(&phi, &p, &small, &quad()).unwrap().sup_quotient.unwrap();
    let b = hardy_family(&phi, &p, &big, &quad()).unwrap().sup_quotient.unwrap();
    assert!((a - b).abs() < 0.05 * a, "{a} vs {b}");
}

#[test]
fn counterexample_lower_bound_and_growth() {
    let ns = geometric(4.0, 2.0, 8);
    let r = run_counterexample(1.5, 3.0, &ns, &quad()).unwrap();
    let lhs8 = r.report.records[1].lhs.as_ref().unwrap().value().unwrap();
    assert!(lhs8 >= 2.0 * 4f64.ln(), "{lhs8}");
    assert!(r.lower_bound_holds);
    assert!(r.rhs_sup_over_median < 2.0, "{}", r.rhs_sup_over_median);
    assert!(r.monotone_beyond_16);
    assert_eq!(r.report.verdict, Verdict::Growing, "{:?}", r.report.growth_fit);
    assert!(matches!(run_counterexample(3.0, 1.5, &ns, &quad()), Err(LabError::ConfigError(_))));
}

#[test]
fn critical_gamma_for_the_sum_grows_on_gn() {
    let base = SeminormParams::new(1, 0.25, 0.0, 0.0).unwrap();
    let fam = FamilySpec::CounterexampleGn { ns: geometric(4.0, 2.0, 7) };
    let r = sweep_gamma(&power_sum(2.0, 4.0), &base, &[0.25], &fam, &quad()).unwrap();
    assert_eq!(r[0].verdict, Verdict::Growing, "{:?}", r[0].growth_fit);
}

#[test]
fn failure_witness_models() {
    let q = quad();
    let p = SeminormParams::new(1, 0.5, 0.0, 0.0).unwrap();
    let w = failure_witness(&power(2.0), &p, &q).unwrap();
    assert!(matches!(w.lhs, QuadratureOutcome::Divergent { growth_model: GrowthModel::Log, .. }));
    assert!(w.growth_fit.r2 >= 0.99);
    // Two half-lines, each contributing ln 2 per level.
    assert!((w.growth_fit.slope - 2.0).abs() < 1e-3, "{}", w.growth_fit.slope);
    assert!(w.rhs.is_converged());

    let p = SeminormParams::new(1, 0.7, 0.0, 0.0).unwrap();
    let w = failure_witness(&power(2.0), &p, &q).unwrap();
    match w.lhs {
        QuadratureOutcome::Divergent { growth_model: GrowthModel::Power { exponent }, .. } => {
            assert!((exponent + 0.4).abs() < 1e-3, "{exponent}")
        }
        other => panic!("{other:?}"),
    }
    assert!(w.rhs.is_converged());

    let p = SeminormParams::new(1, 0.3, 0.0, 0.0).unwrap();
    assert!(matches!(failure_witness(&power(2.0), &p, &q), Err(LabError::ConfigError(_))));
}

#[test]
fn log_hardy_at_the_origin_is_bounded() {
    let setup = LogHardySetup { case: LogCase::AtOrigin, radius: 1.0, n: 1, s: 0.5, exponent: None };
    let fam = FamilySpec::ShrinkToOrigin { radius: 1.0, scales: geometric(0.5, 0.5, 10) };
    let r = check_log_hardy(&power(2.0), &setup, &fam, &quad()).unwrap();
    assert_eq!(r.quotients().len(), 10);
    assert!(r.sup_quotient.unwrap() / r.min_quotient.unwrap() < 10.0);
    assert_eq!(r.verdict, Verdict::Bounded);
}

#[test]
fn log_hardy_at_infinity_is_bounded() {
    let setup = LogHardySetup { case: LogCase::AtInfinity, radius: 1.0, n: 1, s: 0.5, exponent: Some(2.0) };
    let fam = FamilySpec::InvertedGn { ns: geometric(8.0, 2.0, 10), radius: 1.0 };
    let r = check_log_hardy(&power_sum(2.0, 4.0), &setup, &fam, &quad()).unwrap();
    assert_eq!(r.quotients().len(), 10);
    assert!(r.sup_quotient.unwrap() / r.min_quotient.unwrap() < 10.0);
    assert_eq!(r.verdict, Verdict::Bounded);
}

#[test]
fn log_hardy_configuration_errors() {
    let setup = LogHardySetup { case: LogCase::AtOrigin, radius: 1.0, n: 1, s: 0.5, exponent: None };
    let fam = FamilySpec::Bump { radius: 2.0 };
    assert!(matches!(check_log_hardy(&power(2.0), &setup, &fam, &quad()), Err(LabError::ConfigError(_))));
    let custom = OrliczFunction::parse("t^2*(1+t)").unwrap();
    if custom.closed_form().is_none() {
        let fam = FamilySpec::Bump { radius: 1.0 };
        assert!(matches!(check_log_hardy(&custom, &setup, &fam, &quad()), Err(LabError::ConfigError(_))));
    }
}

#[test]
fn local_hardy_regimes() {
    let q = quad();
    let bumps = FamilySpec::Dilations { base: ProfileKind::Bump { radius: 1.0 }, lambdas: vec![0.5, 1.0, 2.0, 4.0] };
    let r = check_local_hardy(&power(3.0), 0.8, 1, &bumps, &q).unwrap();
    assert_eq!(r.verdict, Verdict::Bounded);
    assert_eq!(r.region, Some(Region::Holds));

    let annuli = FamilySpec::AnnulusSupported { ks: vec![-2, -1, 0, 1, 2], radius: 1.0 };
    let r = check_local_hardy(&power(2.0), 0.0, 1, &annuli, &q).unwrap();
    assert_eq!(r.verdict, Verdict::Bounded);
    assert_eq!(r.quotients().len(), 5);
    // For t^2 and these annulus bumps the quotient is dilation invariant.
    let qs = r.quotients();
    assert!(qs.iter().all(|v| (v - qs[0]).abs() < 1e-5 * qs[0]), "{qs:?}");

    assert!(matches!(check_local_hardy(&power(2.0), 0.0, 1, &bumps, &q), Err(LabError::ConfigError(_))));
    let with_zero = vec![Member { param: 1.0, profile: RadialProfile::bump(1.0) }, Member { param: 2.0, profile: RadialProfile::zero() }];
    assert!(matches!(check_local_hardy_members(&power(3.0), 0.8, 1, &with_zero, &q), Err(LabError::DegenerateInput(_))));
}

#[test]
fn sum_of_powers_is_controlled_by_the_power_constants() {
    let members = make_family(&FamilySpec::AnnulusSupported { ks: vec![-1, 0, 1], radius: 1.0 }).unwrap();
    let p = SeminormParams::with_gamma(1, 0.45, 0.4).unwrap();
    let r = sum_trick_check(2.0, 4.0, &p, &members, &quad()).unwrap();
    assert!(r.holds, "{r:?}");
    for x in &r.records {
        assert!(x.quotient_sum <= x.quotient_p.max(x.quotient_q) * (1.0 + 1e-9));
    }
}

#[test]
fn poincare_ratio_is_flat_for_powers() {
    let u = RadialProfile::new(ProfileKind::CosTaper { inner: 1.0, outer: 4.0 }).unwrap();
    let r = poincare_scaling(&power(2.0), &u, (0, 1.0), &[0.5, 1.0, 2.0, 8.0], 0.5, 1, &quad()).unwrap();
    assert!(r.spread < 1e-5, "{:?}", r.ratios);
}

fn record(param: f64, quotient: f64) -> QuotientRecord {
    let m = Member { param, profile: RadialProfile::bump(1.0) };
    let p = SeminormParams::new(1, 0.5, 0.0, 0.0).unwrap();
    QuotientRecord::new(
        0,
        &m,
        p,
        Ok(QuadratureOutcome::converged(quotient, 0.0)),
        Ok(QuadratureOutcome::converged(1.0, 0.0)),
    )
}

#[test]
fn verdict_rules() {
    let lin: Vec<_> = geometric(2.0, 2.0, 8).into_iter().map(|n| record(n, 1.0 + n.ln())).collect();
    let r = VerificationReport::assemble("lin".into(), 0.5, None, lin);
    assert_eq!(r.verdict, Verdict::Growing);
    let g = r.growth_fit.unwrap();
    assert!((g.slope - 1.0).abs() < 1e-12 && g.r2 > 0.999999);

    let sat: Vec<_> = geometric(2.0, 2.0, 8).into_iter().map(|n| record(n, 2.0 - 1.0 / n.ln())).collect();
    assert_eq!(VerificationReport::assemble("sat".into(), 0.5, None, sat).verdict, Verdict::Bounded);

    let flat: Vec<_> = geometric(2.0, 2.0, 8).into_iter().map(|n| record(n, 3.0)).collect();
    let r = VerificationReport::assemble("flat".into(), 0.5, None, flat);
    assert_eq!(r.verdict, Verdict::Bounded);
    assert_eq!(r.sup_quotient, Some(3.0));

    let mut broken: Vec<_> = geometric(2.0, 2.0, 4).into_iter().map(|n| record(n, 3.0)).collect();
    broken[2].quotient = None;
    assert_eq!(VerificationReport::assemble("x".into(), 0.5, None, broken).verdict, Verdict::Inconclusive);
}
