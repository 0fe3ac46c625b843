//! Globally adaptive 7/15-point Gauss-Kronrod quadrature.
//!
//! The rule and the error heuristic follow QUADPACK's `qk15`/`qags` (without
//! the epsilon-algorithm extrapolation). Subintervals are bisected worst-first
//! and the final value is summed left-to-right with compensation, so results
//! are bit-reproducible.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::sum::NeumaierSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerance triple used by every adaptive routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of bisections of any initial panel.
    pub max_depth: u32,
}

impl Tol {
    pub fn new(abs: f64, rel: f64, max_depth: u32) -> Self {
        Self { abs, rel, max_depth }
    }

    /// Same depth, tolerances scaled by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        Self { abs: self.abs * f, rel: self.rel * f, max_depth: self.max_depth }
    }
}

impl Default for Tol {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-6, max_depth: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub evals: usize,
}

impl Integral {
    pub fn zero() -> Self {
        Self { value: 0.0, error: 0.0, converged: true, evals: 0 }
    }
}

/// The 15 Kronrod nodes on `[a, b]`: centre first, then Gauss/Kronrod pairs
/// in the order `qk15_combine` expects.
pub fn qk15_nodes(a: f64, b: f64) -> [f64; 15] {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let mut x = [centr; 15];
    for j in 0..7 {
        let absc = hlgth * XGK[j];
        x[1 + 2 * j] = centr - absc;
        x[2 + 2 * j] = centr + absc;
    }
    x
}

/// Kronrod value and QUADPACK error estimate from values at `qk15_nodes`.
pub fn qk15_combine(fv: &[f64], a: f64, b: f64) -> (f64, f64) {
    let hlgth = 0.5 * (b - a);
    let fc = fv[0];
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    for j in 0..7 {
        let (f1, f2) = (fv[1 + 2 * j], fv[2 + 2 * j]);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[1 + 2 * j] - reskh).abs() + (fv[2 + 2 * j] - reskh).abs());
    }
    let result = resk * hlgth;
    resabs *= hlgth.abs();
    resasc *= hlgth.abs();
    let mut abserr = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * (200.0 * abserr / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    (result, abserr)
}

/// One application of the 15-point rule: (Kronrod value, error estimate).
#[inline]
pub fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let x = qk15_nodes(a, b);
    let mut fv = [0.0; 15];
    for (v, &t) in fv.iter_mut().zip(&x) {
        *v = f(t);
    }
    qk15_combine(&fv, a, b)
}

struct Seg {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Seg {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Seg {
    fn cmp(&self, o: &Self) -> Ordering {
        // Worst error first; ties broken by position for determinism.
        self.err.total_cmp(&o.err).then_with(|| o.a.total_cmp(&self.a))
    }
}

const MAX_SEGMENTS: usize = 20_000;

/// Integrate over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tol) -> Integral {
    integrate_breaks(f, &[a, b], tol)
}

/// Integrate over `[pts[0], pts[last]]` with every entry of `pts` forced to be
/// a panel boundary. `pts` must be non-decreasing; repeated points are skipped.
pub fn integrate_breaks<F: Fn(f64) -> f64>(f: F, pts: &[f64], tol: Tol) -> Integral {
    adaptive(
        |segs: &[(f64, f64)]| segs.iter().map(|&(a, b)| qk15(&f, a, b)).collect(),
        pts,
        tol,
    )
}

/// As `integrate_breaks`, but nodes are handed to `eval` in batches (all
/// initial panels, then both halves of each split). `eval` must return one
/// value per node in order; it may evaluate them in parallel.
pub fn integrate_breaks_batched<F: Fn(&[f64]) -> Vec<f64>>(eval: F, pts: &[f64], tol: Tol) -> Integral {
    adaptive(
        |segs: &[(f64, f64)]| {
            let xs: Vec<f64> = segs.iter().flat_map(|&(a, b)| qk15_nodes(a, b)).collect();
            let fv = eval(&xs);
            segs.iter().zip(fv.chunks(15)).map(|(&(a, b), v)| qk15_combine(v, a, b)).collect()
        },
        pts,
        tol,
    )
}

fn adaptive<R: Fn(&[(f64, f64)]) -> Vec<(f64, f64)>>(rule: R, pts: &[f64], tol: Tol) -> Integral {
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Seg> = Vec::new();
    let init: Vec<(f64, f64)> = pts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect();
    if init.is_empty() {
        return Integral::zero();
    }
    let mut evals = 15 * init.len();
    for (&(a, b), (val, err)) in init.iter().zip(rule(&init)) {
        heap.push(Seg { a, b, val, err, depth: 0 });
    }
    let mut converged = false;
    // Running totals; the final value is re-summed with compensation below.
    let mut run_val: f64 = heap.iter().map(|s| s.val).sum();
    let mut run_err: f64 = heap.iter().map(|s| s.err).sum();
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps.is_multiple_of(256) {
            run_val = heap.iter().chain(done.iter()).map(|s| s.val).sum();
            run_err = heap.iter().chain(done.iter()).map(|s| s.err).sum();
        }
        if !run_val.is_finite() || !run_err.is_finite() {
            break;
        }
        if run_err <= tol.abs.max(tol.rel * run_val.abs()) {
            converged = true;
            break;
        }
        if heap.len() + done.len() >= MAX_SEGMENTS {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if worst.depth >= tol.max_depth || !(m > worst.a && m < worst.b) {
            done.push(worst);
            continue;
        }
        run_val -= worst.val;
        run_err -= worst.err;
        let halves = [(worst.a, m), (m, worst.b)];
        for (&(a, b), (val, err)) in halves.iter().zip(rule(&halves)) {
            evals += 15;
            run_val += val;
            run_err += err;
            heap.push(Seg { a, b, val, err, depth: worst.depth + 1 });
        }
    }
    let mut segs: Vec<Seg> = heap.into_vec();
    segs.extend(done);
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut tv = NeumaierSum::new();
    let mut te = NeumaierSum::new();
    for s in &segs {
        tv.add(s.val);
        te.add(s.err);
    }
    let value = tv.value();
    let error = te.value();
    Integral { value, error, converged: converged && value.is_finite(), evals }
}
