//! Radial test functions `u(x) = g(|x|)`.

use serde::{Deserialize, Serialize};

/// Smooth step used by the cut-off constructions: 0 for `t <= 1`, 1 for
/// `t >= 2`, `exp(-((2-t)/(t-1))^2)` in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 1.0 {
        0.0
    } else if t >= 2.0 {
        1.0
    } else {
        let q = (2.0 - t) / (t - 1.0);
        (-q * q).exp()
    }
}

pub fn smooth_step_prime(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        return 0.0;
    }
    let q = (2.0 - t) / (t - 1.0);
    let f = (-q * q).exp();
    if f == 0.0 {
        0.0
    } else {
        2.0 * q * f / ((t - 1.0) * (t - 1.0))
    }
}

/// `exp(1 - 1/(1 - x^2))` on `|x| < 1`, so the value at 0 is 1.
fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

fn bump_prime(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let d = 1.0 - x * x;
    bump(x) * (-2.0 * x / (d * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Smoothness {
    C1,
    PiecewiseC1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ProfileKind {
    Zero,
    /// `(1 - r/R)_+`.
    Hat { radius: f64 },
    /// Smooth bump on `[0, R)` with value 1 at the origin.
    Bump { radius: f64 },
    /// 1 on `[0, inner]`, smooth step down to 0 at `outer`.
    Plateau { inner: f64, outer: f64 },
    /// 1 on `[0, inner]`, half a cosine period down to 0 at `outer`.
    CosTaper { inner: f64, outer: f64 },
    /// Smooth bump supported in `[lo, hi]`.
    AnnulusBump { lo: f64, hi: f64 },
    /// 0 on `[0, 1/n]`, `f(nr)` up to `2/n`, 1 up to 1, `f(3-r)` down to 0 at 2.
    CounterexampleGn { n: f64 },
    /// `g_n(2R/r)`, supported on `[R, 2nR]`.
    InvertedGn { n: f64, radius: f64 },
    /// `r^e` on `[0, cutoff)`, 0 beyond. Discontinuous; meant for averages.
    Monomial { exponent: f64, cutoff: f64 },
    /// `base(r / lambda)`.
    Dilated { base: Box<ProfileKind>, lambda: f64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid profile: {0}")]
pub struct ProfileError(pub String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    kind: ProfileKind,
    support: (f64, f64),
    breakpoints: Vec<f64>,
}

fn positive(name: &str, v: f64) -> Result<(), ProfileError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ProfileError(format!("{name} must be positive and finite, got {v}")))
    }
}

fn ordered(lo: f64, hi: f64) -> Result<(), ProfileError> {
    if lo < hi && lo.is_finite() && hi.is_finite() {
        Ok(())
    } else {
        Err(ProfileError(format!("need {lo} < {hi}")))
    }
}

/// (support, breakpoints) after validation.
fn layout(kind: &ProfileKind) -> Result<((f64, f64), Vec<f64>), ProfileError> {
    use ProfileKind::*;
    Ok(match kind {
        Zero => ((0.0, 0.0), Vec::new()),
        Hat { radius } | Bump { radius } => {
            positive("radius", *radius)?;
            ((0.0, *radius), vec![*radius])
        }
        Plateau { inner, outer } | CosTaper { inner, outer } => {
            positive("inner", *inner)?;
            ordered(*inner, *outer)?;
            ((0.0, *outer), vec![*inner, *outer])
        }
        AnnulusBump { lo, hi } => {
            positive("lo", *lo)?;
            ordered(*lo, *hi)?;
            ((*lo, *hi), vec![*lo, *hi])
        }
        CounterexampleGn { n } => {
            if !(*n > 2.0 && n.is_finite()) {
                return Err(ProfileError(format!("g_n needs n > 2, got {n}")));
            }
            ((1.0 / n, 2.0), vec![1.0 / n, 2.0 / n, 1.0, 2.0])
        }
        InvertedGn { n, radius } => {
            positive("radius", *radius)?;
            if !(*n > 2.0 && n.is_finite()) {
                return Err(ProfileError(format!("inverted g_n needs n > 2, got {n}")));
            }
            let r = *radius;
            ((r, 2.0 * n * r), vec![r, 2.0 * r, n * r, 2.0 * n * r])
        }
        Monomial { exponent, cutoff } => {
            positive("cutoff", *cutoff)?;
            if !(*exponent >= 0.0) {
                return Err(ProfileError(format!("exponent must be >= 0, got {exponent}")));
            }
            ((0.0, *cutoff), vec![*cutoff])
        }
        Dilated { base, lambda } => {
            positive("lambda", *lambda)?;
            let ((lo, hi), bp) = layout(base)?;
            ((lo * lambda, hi * lambda), bp.into_iter().map(|b| b * lambda).collect())
        }
    })
}

fn eval(kind: &ProfileKind, r: f64) -> f64 {
    use ProfileKind::*;
    match kind {
        Zero => 0.0,
        Hat { radius } => (1.0 - r / radius).max(0.0),
        Bump { radius } => bump(r / radius),
        Plateau { inner, outer } => {
            if r <= *inner {
                1.0
            } else {
                smooth_step(2.0 - (r - inner) / (outer - inner))
            }
        }
        CosTaper { inner, outer } => {
            if r <= *inner {
                1.0
            } else if r >= *outer {
                0.0
            } else {
                0.5 * (1.0 + (std::f64::consts::PI * (r - inner) / (outer - inner)).cos())
            }
        }
        AnnulusBump { lo, hi } => bump((2.0 * r - lo - hi) / (hi - lo)),
        CounterexampleGn { n } => gn(*n, r),
        InvertedGn { n, radius } => {
            if r <= 0.0 {
                0.0
            } else {
                gn(*n, 2.0 * radius / r)
            }
        }
        Monomial { exponent, cutoff } => {
            if r < *cutoff {
                r.powf(*exponent)
            } else {
                0.0
            }
        }
        Dilated { base, lambda } => eval(base, r / lambda),
    }
}

fn eval_prime(kind: &ProfileKind, r: f64) -> f64 {
    use ProfileKind::*;
    match kind {
        Zero => 0.0,
        Hat { radius } => {
            if r < *radius {
                -1.0 / radius
            } else {
                0.0
            }
        }
        Bump { radius } => bump_prime(r / radius) / radius,
        Plateau { inner, outer } => {
            if r <= *inner {
                0.0
            } else {
                -smooth_step_prime(2.0 - (r - inner) / (outer - inner)) / (outer - inner)
            }
        }
        CosTaper { inner, outer } => {
            if r <= *inner || r >= *outer {
                0.0
            } else {
                let w = outer - inner;
                -0.5 * std::f64::consts::PI / w * (std::f64::consts::PI * (r - inner) / w).sin()
            }
        }
        AnnulusBump { lo, hi } => bump_prime((2.0 * r - lo - hi) / (hi - lo)) * 2.0 / (hi - lo),
        CounterexampleGn { n } => gn_prime(*n, r),
        InvertedGn { n, radius } => {
            if r <= 0.0 {
                0.0
            } else {
                gn_prime(*n, 2.0 * radius / r) * (-2.0 * radius / (r * r))
            }
        }
        Monomial { exponent, cutoff } => {
            if r < *cutoff && r > 0.0 {
                exponent * r.powf(exponent - 1.0)
            } else {
                0.0
            }
        }
        Dilated { base, lambda } => eval_prime(base, r / lambda) / lambda,
    }
}

fn gn(n: f64, r: f64) -> f64 {
    if r <= 1.0 / n || r >= 2.0 {
        0.0
    } else if r <= 2.0 / n {
        smooth_step(n * r)
    } else if r <= 1.0 {
        1.0
    } else {
        smooth_step(3.0 - r)
    }
}

fn gn_prime(n: f64, r: f64) -> f64 {
    if r <= 1.0 / n || r >= 2.0 {
        0.0
    } else if r <= 2.0 / n {
        n * smooth_step_prime(n * r)
    } else if r <= 1.0 {
        0.0
    } else {
        -smooth_step_prime(3.0 - r)
    }
}

fn smoothness(kind: &ProfileKind) -> Smoothness {
    use ProfileKind::*;
    match kind {
        Hat { .. } | Monomial { .. } => Smoothness::PiecewiseC1,
        Dilated { base, .. } => smoothness(base),
        _ => Smoothness::C1,
    }
}

impl RadialProfile {
    pub fn new(kind: ProfileKind) -> Result<Self, ProfileError> {
        let (support, breakpoints) = layout(&kind)?;
        Ok(Self { kind, support, breakpoints })
    }

    pub fn zero() -> Self {
        Self::new(ProfileKind::Zero).expect("zero profile")
    }

    pub fn hat(radius: f64) -> Self {
        Self::new(ProfileKind::Hat { radius }).expect("hat radius")
    }

    pub fn bump(radius: f64) -> Self {
        Self::new(ProfileKind::Bump { radius }).expect("bump radius")
    }

    pub fn plateau(inner: f64, outer: f64) -> Self {
        Self::new(ProfileKind::Plateau { inner, outer }).expect("plateau radii")
    }

    pub fn gn(n: f64) -> Self {
        Self::new(ProfileKind::CounterexampleGn { n }).expect("g_n index")
    }

    pub fn dilated(&self, lambda: f64) -> Result<Self, ProfileError> {
        Self::new(ProfileKind::Dilated { base: Box::new(self.kind.clone()), lambda })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    #[inline]
    pub fn g(&self, r: f64) -> f64 {
        eval(&self.kind, r)
    }

    /// `g'(r)`; at a breakpoint the value of the piece to the right.
    #[inline]
    pub fn g_prime(&self, r: f64) -> f64 {
        eval_prime(&self.kind, r)
    }

    /// `[r_lo, r_hi]` outside of which `g` vanishes.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Radii where `g` or `g'` may fail to be smooth, including support ends.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn smoothness(&self) -> Smoothness {
        smoothness(&self.kind)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ProfileKind::Zero)
    }

    pub fn away_from_origin(&self) -> bool {
        self.support.0 > 0.0
    }

    /// Largest `|g'|` seen on a fine sampling of each smooth piece.
    pub fn lipschitz_estimate(&self) -> f64 {
        let (lo, hi) = self.support;
        let mut pts = vec![lo];
        pts.extend(self.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        pts.push(hi);
        let mut m: f64 = 0.0;
        for w in pts.windows(2) {
            for i in 0..=256 {
                let r = w[0] + (w[1] - w[0]) * i as f64 / 256.0;
                m = m.max(self.g_prime(r).abs());
            }
        }
        m
    }

    pub fn describe(&self) -> String {
        describe(&self.kind)
    }
}

fn describe(kind: &ProfileKind) -> String {
    use ProfileKind::*;
    match kind {
        Zero => "zero".into(),
        Hat { radius } => format!("hat(R={radius})"),
        Bump { radius } => format!("bump(R={radius})"),
        Plateau { inner, outer } => format!("plateau({inner},{outer})"),
        CosTaper { inner, outer } => format!("cos-taper({inner},{outer})"),
        AnnulusBump { lo, hi } => format!("annulus-bump({lo},{hi})"),
        CounterexampleGn { n } => format!("g_n(n={n})"),
        InvertedGn { n, radius } => format!("inverted-g_n(n={n},R={radius})"),
        Monomial { exponent, cutoff } => format!("r^{exponent} on [0,{cutoff})"),
        Dilated { base, lambda } => format!("{}(r/{lambda})", describe(base)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gn_pieces() {
        let g = RadialProfile::gn(4.0);
        assert_eq!(g.g(0.2), 0.0);
        assert_eq!(g.g(0.25), 0.0);
        assert!((g.g(0.4) - smooth_step(1.6)).abs() < 1e-15);
        assert_eq!(g.g(0.5), 1.0);
        assert_eq!(g.g(0.75), 1.0);
        assert_eq!(g.g(1.0), 1.0);
        assert!((g.g(1.5) - smooth_step(1.5)).abs() < 1e-15);
        assert_eq!(g.g(2.0), 0.0);
        assert_eq!(g.g(3.0), 0.0);
        assert_eq!(g.support(), (0.25, 2.0));
    }

    #[test]
    fn derivatives_match_differences() {
        let ps = [
            RadialProfile::gn(16.0),
            RadialProfile::bump(1.5),
            RadialProfile::plateau(1.0, 2.0),
            RadialProfile::new(ProfileKind::CosTaper { inner: 1.0, outer: 2.0 }).unwrap(),
            RadialProfile::new(ProfileKind::AnnulusBump { lo: 1.0, hi: 2.0 }).unwrap(),
            RadialProfile::new(ProfileKind::InvertedGn { n: 8.0, radius: 1.0 }).unwrap(),
            RadialProfile::hat(2.0).dilated(3.0).unwrap(),
        ];
        for p in &ps {
            let (lo, hi) = p.support();
            for i in 1..200 {
                let r = lo + (hi - lo) * (i as f64 + 0.37) / 200.0;
                if p.breakpoints().iter().any(|b| (b - r).abs() < 1e-4) {
                    continue;
                }
                let h = 1e-6 * hi;
                let fd = (p.g(r + h) - p.g(r - h)) / (2.0 * h);
                assert!((fd - p.g_prime(r)).abs() < 1e-5 * (1.0 + fd.abs()), "{} at {r}: {fd} vs {}", p.describe(), p.g_prime(r));
            }
        }
    }

    #[test]
    fn constructions() {
        let b = RadialProfile::bump(1.0);
        assert_eq!(b.g(0.0), 1.0);
        assert_eq!(b.support(), (0.0, 1.0));
        let d = RadialProfile::hat(1.0).dilated(2.0).unwrap();
        assert_eq!(d.support(), (0.0, 2.0));
        assert_eq!(d.g(1.0), 0.5);
        let inv = RadialProfile::new(ProfileKind::InvertedGn { n: 8.0, radius: 1.0 }).unwrap();
        assert_eq!(inv.support(), (1.0, 16.0));
        assert_eq!(inv.g(4.0), 1.0);
        assert!(RadialProfile::new(ProfileKind::Plateau { inner: 2.0, outer: 1.0 }).is_err());
        assert!(RadialProfile::new(ProfileKind::CounterexampleGn { n: 1.0 }).is_err());
    }

    #[test]
    fn smooth_step_is_monotone() {
        let mut prev = 0.0;
        for i in 0..=1000 {
            let v = smooth_step(1.0 + i as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
        assert_eq!(prev, 1.0);
    }
}
