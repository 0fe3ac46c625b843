use super::*;
use crate::orlicz::catalog;

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn value(o: &QuadratureOutcome) -> f64 {
    o.value().unwrap_or_else(|| panic!("expected convergence, got {o:?}"))
}

/// Midpoint Riemann sum of `(u(x)-u(y))^2 / |x-y|^2` over `[-1,1]^2` with the
/// diagonal cells dropped; the dropped strip costs O(h).
fn hat_square_riemann(m: usize) -> f64 {
    let h = 2.0 / m as f64;
    let xs: Vec<f64> = (0..m).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
    let us: Vec<f64> = xs.iter().map(|x| 1.0 - x.abs()).collect();
    let mut total = crate::numerics::NeumaierSum::new();
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            if i != j {
                let d = xs[i] - xs[j];
                let du = us[i] - us[j];
                row += du * du / (d * d);
            }
        }
        total.add(row * h * h);
    }
    total.value()
}

/// Brute-force oracle for the hat seminorm with Phi = t^2, N = 1, s = 1/2:
/// Richardson on the square plus the exact outside strip
/// `2 int_{-1}^{1} u^2 (1/(1-x) + 1/(1+x)) dx = 8 (2 ln 2 - 1)`.
fn hat_oracle() -> f64 {
    let (a, b, c) = (hat_square_riemann(1000), hat_square_riemann(2000), hat_square_riemann(4000));
    let r1 = 2.0 * b - a;
    let r2 = 2.0 * c - b;
    let square = (4.0 * r2 - r1) / 3.0;
    square + 8.0 * (2.0 * std::f64::consts::LN_2 - 1.0)
}

#[test]
fn hat_seminorm_matches_brute_force() {
    let p = SeminormParams::new(1, 0.5, 0.0, 0.0).unwrap();
    let got = value(&weighted_seminorm(&catalog::power(2.0), &p, &RadialProfile::hat(1.0), &q()).unwrap());
    let want = hat_oracle();
    assert!((got / want - 1.0).abs() < 1e-3, "{got} vs oracle {want}");
}

#[test]
fn hat_lhs_closed_form() {
    let p = SeminormParams::new(1, 0.5, 0.5, 0.0).unwrap();
    assert_eq!(p.gamma(), 0.0);
    let got = value(&modular_lhs(&catalog::power(2.0), &p, &RadialProfile::hat(1.0), &q()).unwrap());
    assert!((got - 2.0 / 3.0).abs() < 1e-9, "{got}");
}

#[test]
fn zero_profile_gives_zero() {
    let p = SeminormParams::new(1, 0.5, 0.0, 0.0).unwrap();
    let z = RadialProfile::zero();
    let phi = catalog::power(2.0);
    assert_eq!(value(&modular_lhs(&phi, &p, &z, &q()).unwrap()), 0.0);
    assert_eq!(value(&weighted_seminorm(&phi, &p, &z, &q()).unwrap()), 0.0);
    assert_eq!(value(&gradient_modular(&phi, 0.0, 1, &z, &q()).unwrap()), 0.0);
    assert_eq!(value(&log_modular(&phi, LogCase::AtOrigin, 2.0, 1.0, &p, &z, &q()).unwrap()), 0.0);
}

#[test]
fn origin_probe_classifies_divergence() {
    let phi = catalog::power(2.0);
    let u = RadialProfile::plateau(1.0, 2.0);
    let run = |gamma: f64| modular_lhs(&phi, &SeminormParams::with_gamma(1, 0.5, gamma).unwrap(), &u, &q()).unwrap();
    match run(1.0) {
        QuadratureOutcome::Divergent { growth_model: GrowthModel::Power { exponent }, .. } => {
            assert!((exponent + 1.0).abs() < 1e-6, "{exponent}")
        }
        o => panic!("{o:?}"),
    }
    match run(0.7) {
        QuadratureOutcome::Divergent { growth_model: GrowthModel::Power { exponent }, .. } => {
            assert!((exponent + 0.4).abs() < 1e-6, "{exponent}")
        }
        o => panic!("{o:?}"),
    }
    match run(0.5) {
        QuadratureOutcome::Divergent { growth_model: GrowthModel::Log, r2, partial_values, cutoffs } => {
            assert!(r2 >= 0.99);
            // Oracle: on [eps, 1] the integrand is exactly 2/r, so consecutive
            // partial values differ by 2 ln 2.
            let n = partial_values.len();
            assert!(n >= 4 && cutoffs.len() == n);
            let step = partial_values[n - 1] - partial_values[n - 2];
            assert!((step - 2.0 * std::f64::consts::LN_2).abs() < 1e-9, "{step}");
        }
        o => panic!("{o:?}"),
    }
    // Below the threshold the same profile converges.
    assert!(run(0.3).is_converged());
}

#[test]
fn lhs_near_threshold_matches_closed_form() {
    // Phi = t^2, gamma = 0.45, u = 1 on [0,1]: 2 int_0^1 r^{-0.9} dr = 20, plus the ramp.
    let phi = catalog::power(2.0);
    let u = RadialProfile::plateau(1.0, 2.0);
    let p = SeminormParams::with_gamma(1, 0.5, 0.45).unwrap();
    let got = value(&modular_lhs(&phi, &p, &u, &q()).unwrap());
    let ramp = crate::numerics::integrate(|r: f64| 2.0 * u.g(r).powi(2) * r.powf(-0.9), 1.0, 2.0, crate::numerics::Tol::new(1e-15, 1e-13, 50));
    assert!((got - (20.0 + ramp.value)).abs() < 1e-6 * got, "{got}");
}

#[test]
fn tail_divergence_is_reported() {
    let phi = catalog::power(2.0);
    let u = RadialProfile::bump(1.0);
    let p = SeminormParams::new(1, 0.5, 0.0, 0.5).unwrap();
    assert!(matches!(weighted_seminorm(&phi, &p, &u, &q()), Err(QuadError::TailDivergent { .. })));
    let p = SeminormParams::new(1, 0.5, 0.6, 0.0).unwrap();
    assert!(matches!(weighted_seminorm(&phi, &p, &u, &q()), Err(QuadError::TailDivergent { .. })));
}

#[test]
fn seminorm_is_symmetric_in_the_weights() {
    let phi = catalog::power_sum(2.0, 3.0);
    let u = RadialProfile::bump(1.0);
    let a = value(&weighted_seminorm(&phi, &SeminormParams::new(1, 0.4, 0.1, -0.2).unwrap(), &u, &q()).unwrap());
    let b = value(&weighted_seminorm(&phi, &SeminormParams::new(1, 0.4, -0.2, 0.1).unwrap(), &u, &q()).unwrap());
    assert!((a / b - 1.0).abs() < 2e-6, "{a} {b}");
}

#[test]
fn origin_singular_weights() {
    let phi = catalog::power(2.0);
    let u = RadialProfile::bump(1.0);
    let p = SeminormParams::new(1, 0.4, -1.5, 0.0).unwrap();
    assert!(matches!(weighted_seminorm(&phi, &p, &u, &q()), Err(QuadError::OriginSingular { .. })));
}

#[test]
fn dilation_covariance_for_powers() {
    // For Phi = t^p, alpha = 0, gamma = s both sides scale by lam^{N - s p}.
    let u = RadialProfile::bump(1.0);
    for (n, pw, s) in [(1usize, 2.0, 0.4), (1, 3.0, 0.25), (2, 2.0, 0.4), (3, 2.0, 0.5)] {
        let phi = catalog::power(pw);
        let p = SeminormParams::new(n, s, 0.0, 0.0).unwrap();
        let lam = 2.0;
        let ul = u.dilated(lam).unwrap();
        let f = lam.powf(n as f64 - s * pw);
        let l1 = value(&modular_lhs(&phi, &p, &u, &q()).unwrap());
        let l2 = value(&modular_lhs(&phi, &p, &ul, &q()).unwrap());
        assert!((l2 / (f * l1) - 1.0).abs() < 2e-6, "lhs N={n}");
        let r1 = value(&weighted_seminorm(&phi, &p, &u, &q()).unwrap());
        let r2 = value(&weighted_seminorm(&phi, &p, &ul, &q()).unwrap());
        assert!((r2 / (f * r1) - 1.0).abs() < 2e-6, "rhs N={n}: {r1} {r2}");
    }
}

#[test]
fn gradient_modular_examples() {
    let hat = RadialProfile::hat(1.0);
    let got = value(&gradient_modular(&catalog::power(2.0), 0.0, 1, &hat, &q()).unwrap());
    assert!((got - 2.0).abs() < 1e-10);
    let got = value(&gradient_modular(&catalog::power(3.0), 1.0, 1, &hat, &q()).unwrap());
    assert!((got - 0.5).abs() < 1e-10);
    // Only the ramp of a plateau contributes.
    let u = RadialProfile::new(ProfileKind::CosTaper { inner: 1.0, outer: 2.0 }).unwrap();
    let got = value(&gradient_modular(&catalog::power(2.0), 0.0, 1, &u, &q()).unwrap());
    let want = 2.0 * (std::f64::consts::PI / 2.0).powi(2) * 0.5;
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
}

#[test]
fn annulus_averages() {
    let one = RadialProfile::plateau(4.0, 5.0);
    assert!((annulus_average(&one, 0, 1.0, 2, &q()) - 1.0).abs() < 1e-12);
    let far = RadialProfile::hat(0.5);
    assert_eq!(annulus_average(&far, 0, 1.0, 3, &q()), 0.0);
    let lin = RadialProfile::new(ProfileKind::Monomial { exponent: 1.0, cutoff: 10.0 }).unwrap();
    assert!((annulus_average(&lin, 0, 1.0, 1, &q()) - 1.5).abs() < 1e-12);
    // N = 3: 3 int_1^2 r^3 dr / 7 = 45/28.
    assert!((annulus_average(&lin, 0, 1.0, 3, &q()) - 45.0 / 28.0).abs() < 1e-12);
}

#[test]
fn log_modular_at_infinity_matches_dense_oracle() {
    let phi = catalog::power(2.0);
    let u = RadialProfile::new(ProfileKind::AnnulusBump { lo: 1.0, hi: 2.0 }).unwrap();
    let p = SeminormParams::with_gamma(1, 0.5, 0.5).unwrap();
    let got = value(&log_modular(&phi, LogCase::AtInfinity, 2.0, 1.0, &p, &u, &q()).unwrap());
    // Composite Simpson on a uniform grid.
    let m = 200_000;
    let h = 1.0 / m as f64;
    let f = |r: f64| 2.0 * (u.g(r).powi(2) / r) / (2.0 * r).ln().powi(2);
    let mut s = f(1.0) + f(2.0);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(1.0 + i as f64 * h);
    }
    let want = s * h / 3.0;
    assert!((got / want - 1.0).abs() < 1e-6, "{got} vs {want}");
}

#[test]
fn log_modular_is_below_plain_modular() {
    let phi = catalog::power(2.0);
    let u = RadialProfile::gn(16.0);
    let p = SeminormParams::with_gamma(1, 0.5, 0.5).unwrap();
    let e = 2.0;
    let lg = value(&log_modular(&phi, LogCase::AtOrigin, e, 2.0, &p, &u, &q()).unwrap());
    let plain = value(&modular_lhs(&phi, &p, &u, &q()).unwrap());
    assert!(lg <= plain / std::f64::consts::LN_2.powf(e));
    assert!(matches!(
        log_modular(&phi, LogCase::AtOrigin, e, 1.0, &p, &u, &q()),
        Err(QuadError::SupportViolation(_))
    ));
}

#[test]
fn poincare_ratio_is_scale_invariant_for_squares() {
    let phi = catalog::power(2.0);
    let u = RadialProfile::new(ProfileKind::CosTaper { inner: 1.0, outer: 2.0 }).unwrap();
    let base = poincare_pair(&phi, &u, (0, 1.0), 1.0, 0.5, 1, &q()).unwrap();
    assert!(base.lhs > 0.0 && base.rhs > 0.0);
    for lam in [2.0, 4.0, 8.0] {
        let pr = poincare_pair(&phi, &u, (0, 1.0), lam, 0.5, 1, &q()).unwrap();
        assert!((pr.ratio() / base.ratio() - 1.0).abs() < 2e-6, "lam {lam}: {} vs {}", pr.ratio(), base.ratio());
    }
    let local = poincare_pair(&phi, &u, (0, 1.0), 2.0, 1.0, 1, &q()).unwrap();
    assert!(local.rhs > 0.0);
}

#[test]
fn constant_on_annulus_has_zero_oscillation() {
    let phi = catalog::power(2.0);
    let u = RadialProfile::plateau(10.0, 11.0);
    let pr = poincare_pair(&phi, &u, (0, 1.0), 1.0, 0.5, 1, &q()).unwrap();
    assert!(pr.lhs.abs() < 1e-14);
}

#[test]
fn three_dimensional_kernel_agrees_with_theta_quadrature() {
    // Independent check of the N = 3 reduction: integrate the angular
    // density directly in theta for Phi = t^2 + t^3 and compare with the
    // seminorm of an annulus-supported profile computed via the tabulated path.
    let phi = catalog::power_sum(2.0, 3.0);
    let u = RadialProfile::new(ProfileKind::AnnulusBump { lo: 1.0, hi: 2.0 }).unwrap();
    let p = SeminormParams::new(3, 0.5, 0.0, 0.0).unwrap();
    let q = QuadratureSpec { rel_tol: 1e-7, ..q() };
    let got = value(&weighted_seminorm_on(&phi, &p, &u, (1.0, 2.0), 1.0, &q).unwrap());

    use crate::numerics::{integrate, integrate_breaks, Tol};
    use std::f64::consts::PI;
    let tol = Tol::new(1e-15, 1e-9, 50);
    let dens = |r: f64, rho: f64| {
        let c = (u.g(r) - u.g(rho)).abs();
        if c == 0.0 {
            return 0.0;
        }
        let f = |t: f64| {
            let w2 = (r - rho).powi(2) + 4.0 * r * rho * (0.5 * t).sin().powi(2);
            phi.value(c * w2.powf(-0.25)) * w2.powf(-1.5) * t.sin()
        };
        let t0 = ((r - rho).abs() / (r * rho).sqrt()).max(1e-12);
        let mut pts = vec![0.0];
        let mut t = t0;
        while t < PI {
            pts.push(t);
            t *= 2.0;
        }
        pts.push(PI);
        8.0 * PI * PI * r * r * rho * rho * integrate_breaks(f, &pts, tol).value
    };
    let outer = |r: f64| {
        let mut pts = vec![0.0];
        let mut d = 1e-12;
        while d < 2.0 - r {
            pts.push(d);
            d *= 2.0;
        }
        pts.push(2.0 - r);
        integrate_breaks(|d: f64| dens(r, r + d) + dens(r + d, r), &pts, Tol::new(1e-15, 1e-8, 50)).value
    };
    let want = integrate(outer, 1.0, 2.0, Tol::new(1e-14, 1e-7, 30)).value;
    assert!((got / want - 1.0).abs() < 1e-5, "{got} vs {want}");
}
