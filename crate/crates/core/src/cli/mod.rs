//! Batch front end. One invocation runs one command and writes
//! `report.json`, `report.csv` and `plot.svg` into the output directory.
//!
//! Settings come from an optional JSON config file (`--config`) and from
//! flags; flags win.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dyadic::{annulus_data, dyadic_certificate, feasible_lambda, DyadicError, Regime};
use crate::lab::{
    self, check_local_hardy, check_log_hardy, failure_witness, hardy_family, make_family, poincare_scaling, run_counterexample,
    sweep_gamma, FamilySpec, LabError, LogHardySetup, Region, VerificationReport, Verdict,
};
use crate::lemmas::{estimate_split_constant, SplitGrid};
use crate::numerics::LogGrid;
use crate::orlicz::{check_equivalence, estimate_sharp_indices, parse_orlicz, OrliczError, OrliczFunction};
use crate::quadrature::{LogCase, ProfileKind, QuadratureOutcome, QuadratureSpec, RadialProfile, SeminormParams};

pub use output::{format_float, write_csv, write_json, write_svg, CsvRow, Series};

/// Default output directory when neither flag nor config sets one.
pub const OUTPUT_DIR_ENV: &str = "ORLICZ_LAB_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Indices,
    Equivalence,
    SplitLemma,
    Hardy,
    SweepGamma,
    Counterexample,
    LogHardy,
    LocalHardy,
    PoincareScaling,
    FailureWitness,
}

impl CommandName {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Indices => "indices",
            Self::Equivalence => "equivalence",
            Self::SplitLemma => "split-lemma",
            Self::Hardy => "hardy",
            Self::SweepGamma => "sweep-gamma",
            Self::Counterexample => "counterexample",
            Self::LogHardy => "log-hardy",
            Self::LocalHardy => "local-hardy",
            Self::PoincareScaling => "poincare-scaling",
            Self::FailureWitness => "failure-witness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadOverrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_refinement_depth: Option<u32>,
    pub diagonal_band_width: Option<f64>,
    pub probe_min_levels: Option<usize>,
    pub probe_max_levels: Option<usize>,
}

impl QuadOverrides {
    pub fn apply(&self) -> QuadratureSpec {
        let d = QuadratureSpec::default();
        QuadratureSpec {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_refinement_depth: self.max_refinement_depth.unwrap_or(d.max_refinement_depth),
            diagonal_band_width: self.diagonal_band_width.unwrap_or(d.diagonal_band_width),
            probe_min_levels: self.probe_min_levels.unwrap_or(d.probe_min_levels),
            probe_max_levels: self.probe_max_levels.unwrap_or(d.probe_max_levels),
        }
    }

    fn or(self, other: Self) -> Self {
        Self {
            rel_tol: self.rel_tol.or(other.rel_tol),
            abs_tol: self.abs_tol.or(other.abs_tol),
            max_refinement_depth: self.max_refinement_depth.or(other.max_refinement_depth),
            diagonal_band_width: self.diagonal_band_width.or(other.diagonal_band_width),
            probe_min_levels: self.probe_min_levels.or(other.probe_min_levels),
            probe_max_levels: self.probe_max_levels.or(other.probe_max_levels),
        }
    }
}

/// Everything a run needs. Unset fields take command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandName>,
    pub phi: Option<String>,
    pub psi: Option<String>,
    /// Space dimension `N`.
    pub dim: Option<usize>,
    pub s: Option<f64>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    /// Gradient weight exponent for `local-hardy`.
    pub alpha: Option<f64>,
    pub gammas: Option<Vec<f64>>,
    pub family: Option<FamilySpec>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    /// `n` values of the `g_n` family.
    pub n: Option<Vec<f64>>,
    pub case: Option<LogCase>,
    pub radius: Option<f64>,
    pub exponent: Option<f64>,
    /// `Lambda` for the split lemma.
    pub lambda: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    /// Annulus index for `poincare-scaling`.
    pub k: Option<i32>,
    pub profile: Option<ProfileKind>,
    /// Attach dyadic certificates to `hardy` runs.
    pub certify: Option<bool>,
    pub quad: QuadOverrides,
    pub output: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr; $($f:ident),*) => {
        RunConfig { $($f: $hi.$f.or($lo.$f),)* quad: $hi.quad.or($lo.quad) }
    };
}

impl RunConfig {
    /// `self` wins field by field.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(self, base; command, phi, psi, dim, s, alpha1, alpha2, alpha, gammas, family, p, q, n, case, radius,
            exponent, lambda, lambdas, k, profile, certify, output, formats, threads)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Orlicz(#[from] OrliczError),
    #[error(transparent)]
    Lab(#[from] LabError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lab(LabError::UnexpectedConvergence(_)) => 2,
            _ => 1,
        }
    }
}

fn cfg_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Parser, Debug)]
#[command(name = "orlicz-lab", version, about = "Orlicz-function indices and numerical Hardy-inequality experiments")]
pub struct Cli {
    /// Command to run; may also come from the config file.
    #[arg(value_enum)]
    pub command: Option<CommandName>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Orlicz function, e.g. "t^2+t^4" or "[0,1]: t^2; [1,inf): 2*t-1".
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub psi: Option<String>,
    /// Space dimension N.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gammas: Option<Vec<f64>>,
    /// Family as JSON, e.g. '{"kind":"Bump","radius":1}'.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Comma-separated n values for the counterexample family.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_case)]
    pub case: Option<LogCase>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub exponent: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i32>,
    /// Profile as JSON, e.g. '{"kind":"CosTaper","inner":1,"outer":4}'.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub certify: bool,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub max_refinement_depth: Option<u32>,
    #[arg(long)]
    pub diagonal_band_width: Option<f64>,
    #[arg(long)]
    pub probe_min_levels: Option<usize>,
    #[arg(long)]
    pub probe_max_levels: Option<usize>,
    /// Output directory (default: $ORLICZ_LAB_OUTPUT_DIR, then ./orlicz-lab-out).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub formats: Option<Vec<Format>>,
    /// Cap on worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
}

fn parse_case(s: &str) -> Result<LogCase, String> {
    match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
        "origin" | "atorigin" => Ok(LogCase::AtOrigin),
        "infinity" | "atinfinity" => Ok(LogCase::AtInfinity),
        _ => Err(format!("expected 'origin' or 'infinity', got '{s}'")),
    }
}

impl Cli {
    /// Flags merged over the config file, if any.
    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| cfg_err(format!("bad config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        let family = match &self.family {
            Some(s) => Some(serde_json::from_str(s).map_err(|e| cfg_err(format!("bad --family: {e}")))?),
            None => None,
        };
        let profile = match &self.profile {
            Some(s) => Some(serde_json::from_str(s).map_err(|e| cfg_err(format!("bad --profile: {e}")))?),
            None => None,
        };
        let flags = RunConfig {
            command: self.command,
            phi: self.phi,
            psi: self.psi,
            dim: self.dim,
            s: self.s,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            alpha: self.alpha,
            gammas: self.gammas,
            family,
            p: self.p,
            q: self.q,
            n: self.n,
            case: self.case,
            radius: self.radius,
            exponent: self.exponent,
            lambda: self.lambda,
            lambdas: self.lambdas,
            k: self.k,
            profile,
            certify: self.certify.then_some(true),
            quad: QuadOverrides {
                rel_tol: self.rel_tol,
                abs_tol: self.abs_tol,
                max_refinement_depth: self.max_refinement_depth,
                diagonal_band_width: self.diagonal_band_width,
                probe_min_levels: self.probe_min_levels,
                probe_max_levels: self.probe_max_levels,
            },
            output: self.output,
            formats: self.formats,
            threads: self.threads,
        };
        Ok(flags.over(base))
    }
}

/// What a command produced, before anything touches the disk.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub reports: Vec<Value>,
    pub rows: Vec<CsvRow>,
    pub series: Vec<Series>,
    /// Set when a result contradicts what the theory guarantees.
    pub contradiction: Option<String>,
}

impl RunOutput {
    fn flag(&mut self, msg: String) {
        if self.contradiction.is_none() {
            self.contradiction = Some(msg);
        }
    }
}

fn require<T: Clone>(v: &Option<T>, name: &str, cmd: CommandName) -> Result<T, CliError> {
    v.clone().ok_or_else(|| cfg_err(format!("{} needs --{name}", cmd.name())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn phi_of(cfg: &RunConfig, cmd: CommandName) -> Result<(String, OrliczFunction), CliError> {
    let src = require(&cfg.phi, "phi", cmd)?;
    let phi = parse_orlicz(&src)?;
    Ok((src, phi))
}

fn params_of(cfg: &RunConfig) -> Result<SeminormParams, CliError> {
    SeminormParams::new(cfg.dim.unwrap_or(1), cfg.s.unwrap_or(0.5), cfg.alpha1.unwrap_or(0.0), cfg.alpha2.unwrap_or(0.0))
        .map_err(|e| cfg_err(e.to_string()))
}

/// Runs the configured command on a pool of `threads` workers.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(cfg_err("--threads must be at least 1"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| cfg_err(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cfg))
}

fn dispatch(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let cmd = cfg.command.ok_or_else(|| cfg_err("no command given"))?;
    let quad = cfg.quad.apply();
    quad.validate().map_err(|e| cfg_err(e.to_string()))?;
    let mut out = RunOutput::default();
    match cmd {
        CommandName::Indices => {
            let (src, phi) = phi_of(cfg, cmd)?;
            let sharp = estimate_sharp_indices(&phi).ok();
            out.reports.push(json!({
                "phi": src,
                "p_minus": phi.p_minus(),
                "p_plus": phi.p_plus(),
                "indices": to_value(phi.indices()),
                "closed_form": to_value(&phi.closed_form()),
                "sharp_estimate": to_value(&sharp),
            }));
            out.rows.push(CsvRow::bare(cmd, &src));
        }
        CommandName::Equivalence => {
            let (src, phi) = phi_of(cfg, cmd)?;
            let psi_src = require(&cfg.psi, "psi", cmd)?;
            let psi = parse_orlicz(&psi_src)?;
            let rep = check_equivalence(&phi, &psi, &LogGrid::default());
            if rep.is_equivalent() && !rep.index_check.holds() {
                out.flag("equivalent functions with incompatible indices".into());
            }
            out.reports.push(json!({ "phi": src, "psi": psi_src, "report": to_value(&rep) }));
            out.rows.push(CsvRow::bare(cmd, &src));
        }
        CommandName::SplitLemma => {
            let (src, phi) = phi_of(cfg, cmd)?;
            let lam = cfg.lambda.unwrap_or(2.0);
            let rep = estimate_split_constant(&phi, lam, &SplitGrid::default())?;
            if rep.held_out_violations > 0 {
                out.flag(format!("split inequality fails at {} held-out points", rep.held_out_violations));
            }
            out.reports.push(json!({ "phi": src, "report": to_value(&rep) }));
            out.rows.push(CsvRow::bare(cmd, &src));
        }
        CommandName::Hardy => {
            let (src, phi) = phi_of(cfg, cmd)?;
            let p = params_of(cfg)?;
            let members = make_family(&require(&cfg.family, "family", cmd)?)?;
            let rep = hardy_family(&phi, &p, &members, &quad)?;
            check_verdict(&rep, &mut out);
            let mut value = to_value(&rep);
            if cfg.certify.unwrap_or(false) {
                let certs = certificates(&phi, &p, &members, &quad, &mut out);
                value["certificates"] = Value::Array(certs);
            }
            push_report(cmd, &src, &rep, value, &mut out);
        }
        CommandName::SweepGamma => {
            let (src, phi) = phi_of(cfg, cmd)?;
            let base = params_of(cfg)?;
            let gammas = require(&cfg.gammas, "gammas", cmd)?;
            let family = require(&cfg.family, "family", cmd)?;
            for rep in sweep_gamma(&phi, &base, &gammas, &family, &quad)? {
                check_verdict(&rep, &mut out);
                let v = to_value(&rep);
                push_report(cmd, &src, &rep, v, &mut out);
            }
        }
        CommandName::Counterexample => {
            let p = cfg.p.unwrap_or(1.5);
            let q = cfg.q.unwrap_or(3.0);
            let ns = require(&cfg.n, "n", cmd)?;
            let rep = run_counterexample(p, q, &ns, &quad)?;
            if !rep.lower_bound_holds {
                out.flag("left side below the analytic lower bound 2 log(n/2)".into());
            }
            let src = format!("t^{p}+t^{q}");
            let v = to_value(&rep);
            push_report(cmd, &src, &rep.report, v, &mut out);
        }
        CommandName::LogHardy => {
            let (src, phi) = phi_of(cfg, cmd)?;
            let setup = LogHardySetup {
                case: require(&cfg.case, "case", cmd)?,
                radius: cfg.radius.unwrap_or(1.0),
                n: cfg.dim.unwrap_or(1),
                s: cfg.s.unwrap_or(0.5),
                exponent: cfg.exponent,
            };
            let rep = check_log_hardy(&phi, &setup, &require(&cfg.family, "family", cmd)?, &quad)?;
            if rep.verdict == Verdict::Growing {
                out.flag("log-corrected quotient grows".into());
            }
            let v = to_value(&rep);
            push_report(cmd, &src, &rep, v, &mut out);
        }
        CommandName::LocalHardy => {
            let (src, phi) = phi_of(cfg, cmd)?;
            let alpha = require(&cfg.alpha, "alpha", cmd)?;
            let rep = check_local_hardy(&phi, alpha, cfg.dim.unwrap_or(1), &require(&cfg.family, "family", cmd)?, &quad)?;
            if rep.verdict == Verdict::Growing {
                out.flag("local quotient grows inside a regime where the inequality holds".into());
            }
            let v = to_value(&rep);
            push_report(cmd, &src, &rep, v, &mut out);
        }
        CommandName::PoincareScaling => {
            let (src, phi) = phi_of(cfg, cmd)?;
            let kind = cfg.profile.clone().unwrap_or(ProfileKind::CosTaper { inner: 1.0, outer: 4.0 });
            let u = RadialProfile::new(kind).map_err(|e| cfg_err(e.to_string()))?;
            let lambdas = cfg.lambdas.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
            let (n, s) = (cfg.dim.unwrap_or(1), cfg.s.unwrap_or(0.5));
            let rep = poincare_scaling(&phi, &u, (cfg.k.unwrap_or(0), cfg.radius.unwrap_or(1.0)), &lambdas, s, n, &quad)?;
            let params = SeminormParams::new(n, s, 0.0, 0.0).ok();
            let mut pts = Vec::new();
            for (i, pair) in rep.pairs.iter().enumerate() {
                let mut row = CsvRow::bare(cmd, &src);
                row.set_params(params.as_ref(), n, s);
                row.member_id = Some(i);
                row.lhs_value = Some(format_float(pair.lhs));
                row.lhs_verdict = "converged".into();
                row.rhs_value = Some(format_float(pair.rhs));
                row.rhs_verdict = "converged".into();
                row.quotient = Some(format_float(pair.ratio()));
                out.rows.push(row);
                pts.push((pair.lambda, pair.ratio()));
            }
            out.series.push(Series { name: "oscillation / seminorm".into(), x_label: "lambda".into(), points: pts });
            out.reports.push(json!({ "phi": src, "report": to_value(&rep) }));
        }
        CommandName::FailureWitness => {
            let (src, phi) = phi_of(cfg, cmd)?;
            let p = params_of(cfg)?;
            let mut row = CsvRow::bare(cmd, &src);
            row.set_params(Some(&p), p.n, p.s);
            match failure_witness(&phi, &p, &quad) {
                Ok(w) => {
                    row.member_id = Some(0);
                    row.lhs_verdict = w.lhs.label().into();
                    fill_outcome(&mut row.rhs_value, &mut row.rhs_verdict, Some(&w.rhs), None);
                    out.reports.push(json!({ "phi": src, "witness": to_value(&w) }));
                }
                Err(LabError::Quad(e)) => {
                    row.lhs_verdict = "failed".into();
                    out.reports.push(json!({ "phi": src, "error": e.to_string() }));
                }
                Err(e @ LabError::UnexpectedConvergence(_)) => {
                    out.flag(e.to_string());
                    row.lhs_verdict = "converged".into();
                    out.reports.push(json!({ "phi": src, "error": e.to_string() }));
                }
                Err(e) => return Err(e.into()),
            }
            out.rows.push(row);
        }
    }
    Ok(out)
}

/// Growth where the theory guarantees the inequality is a contradiction;
/// boundedness in the failing region is not (the family may just miss).
fn check_verdict(rep: &VerificationReport, out: &mut RunOutput) {
    if rep.region == Some(Region::Holds) && rep.verdict == Verdict::Growing {
        out.flag(format!("{}: quotient grows although gamma is in the holding region", rep.title));
    }
}

fn certificates(
    phi: &OrliczFunction,
    p: &SeminormParams,
    members: &[lab::Member],
    quad: &QuadratureSpec,
    out: &mut RunOutput,
) -> Vec<Value> {
    let gamma = p.gamma();
    members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let regime = if m.profile.away_from_origin() && feasible_lambda(p.n, gamma, phi, Regime::Inner).is_none() {
                Regime::Outer
            } else {
                Regime::Inner
            };
            let Some(lam) = feasible_lambda(p.n, gamma, phi, regime) else {
                return json!({ "member_id": i, "status": "infeasible" });
            };
            let res = annulus_data(phi, p, &m.profile, 10, quad).and_then(|d| dyadic_certificate(&d, phi, p.n, gamma, lam));
            match res {
                Ok(c) => json!({ "member_id": i, "status": "holds", "certificate": to_value(&c) }),
                Err(e @ DyadicError::CertificateFailed { .. }) => {
                    out.flag(format!("member {i}: {e}"));
                    json!({ "member_id": i, "status": "failed", "error": e.to_string() })
                }
                Err(e) => json!({ "member_id": i, "status": "error", "error": e.to_string() }),
            }
        })
        .collect()
}

fn fill_outcome(value: &mut Option<String>, verdict: &mut String, o: Option<&QuadratureOutcome>, failure: Option<&String>) {
    match (o, failure) {
        (Some(o), _) => {
            *value = o.value().map(format_float);
            *verdict = o.label().into();
        }
        (None, Some(_)) => *verdict = "failed".into(),
        (None, None) => *verdict = String::new(),
    }
}

fn push_report(cmd: CommandName, src: &str, rep: &VerificationReport, value: Value, out: &mut RunOutput) {
    let region = rep.region.map(|r| r.label().to_string()).unwrap_or_default();
    let mut pts = Vec::new();
    for r in &rep.records {
        let mut row = CsvRow::bare(cmd, src);
        row.set_params(Some(&r.params), r.params.n, r.params.s);
        row.member_id = Some(r.member_id);
        fill_outcome(&mut row.lhs_value, &mut row.lhs_verdict, r.lhs.as_ref(), r.lhs_failure.as_ref());
        fill_outcome(&mut row.rhs_value, &mut row.rhs_verdict, r.rhs.as_ref(), r.rhs_failure.as_ref());
        row.quotient = r.quotient.map(format_float);
        row.region_annotation = region.clone();
        out.rows.push(row);
        if let Some(q) = r.quotient {
            pts.push((r.param, q));
        }
    }
    out.series.push(Series { name: format!("gamma = {}", format_short(rep.gamma)), x_label: "family parameter".into(), points: pts });
    out.reports.push(value);
}

fn format_short(v: f64) -> String {
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("orlicz-lab-out"))
}

/// Writes the requested artifacts into `dir`.
pub fn write_artifacts(cfg: &RunConfig, out: &RunOutput, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let formats = cfg.formats.clone().unwrap_or_else(|| vec![Format::Json, Format::Csv, Format::Svg]);
    if formats.contains(&Format::Json) {
        let doc = json!({
            "config_echo": to_value(cfg),
            "reports": out.reports,
            "contradiction": out.contradiction,
            "environment": {
                "version": env!("CARGO_PKG_VERSION"),
                "tolerances": to_value(&cfg.quad.apply()),
            },
        });
        write_json(&dir.join("report.json"), &doc)?;
    }
    if formats.contains(&Format::Csv) {
        write_csv(&dir.join("report.csv"), &out.rows)?;
    }
    if formats.contains(&Format::Svg) {
        write_svg(&dir.join("plot.svg"), &out.series)?;
    }
    Ok(())
}

/// Entry point for the binary: 0 on success, 1 on usage or configuration
/// errors, 2 when a result contradicts the theory.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = cli.resolve().and_then(|cfg| {
        let out = run(&cfg)?;
        let dir = output_dir(&cfg);
        write_artifacts(&cfg, &out, &dir)?;
        Ok((out, dir))
    });
    match result {
        Ok((out, dir)) => {
            eprintln!("wrote {}", dir.display());
            match out.contradiction {
                Some(msg) => {
                    eprintln!("contradiction: {msg}");
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
