use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use super::CommandName;
use crate::quadrature::SeminormParams;

/// 17 significant digits, scientific notation.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Pretty printing with every float at 17 significant digits.
struct SigFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SigFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_float(value).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn json_string(doc: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter(PrettyFormatter::new()));
    doc.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn write_json(path: &Path, doc: &Value) -> io::Result<()> {
    std::fs::write(path, json_string(doc))
}

/// One CSV line. Floats are pre-formatted so the file is byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub command: String,
    pub phi: String,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub s: Option<String>,
    pub alpha1: Option<String>,
    pub alpha2: Option<String>,
    pub gamma: Option<String>,
    pub member_id: Option<usize>,
    pub lhs_value: Option<String>,
    pub lhs_verdict: String,
    pub rhs_value: Option<String>,
    pub rhs_verdict: String,
    pub quotient: Option<String>,
    pub region_annotation: String,
}

impl CsvRow {
    pub fn bare(cmd: CommandName, phi: &str) -> Self {
        Self {
            command: cmd.name().into(),
            phi: phi.into(),
            n: None,
            s: None,
            alpha1: None,
            alpha2: None,
            gamma: None,
            member_id: None,
            lhs_value: None,
            lhs_verdict: String::new(),
            rhs_value: None,
            rhs_verdict: String::new(),
            quotient: None,
            region_annotation: String::new(),
        }
    }

    pub(crate) fn set_params(&mut self, p: Option<&SeminormParams>, n: usize, s: f64) {
        self.n = Some(n);
        self.s = Some(format_float(s));
        if let Some(p) = p {
            self.alpha1 = Some(format_float(p.alpha1));
            self.alpha2 = Some(format_float(p.alpha2));
            self.gamma = Some(format_float(p.gamma()));
        }
    }
}

pub fn csv_string(rows: &[CsvRow]) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record([
            "command",
            "phi",
            "N",
            "s",
            "alpha1",
            "alpha2",
            "gamma",
            "member_id",
            "lhs_value",
            "lhs_verdict",
            "rhs_value",
            "rhs_verdict",
            "quotient",
            "region_annotation",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> io::Result<()> {
    std::fs::write(path, csv_string(rows)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub x_label: String,
    pub points: Vec<(f64, f64)>,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(vals: impl Iterator<Item = f64> + Clone) -> Self {
        let lo = vals.clone().fold(f64::INFINITY, f64::min);
        let hi = vals.fold(f64::NEG_INFINITY, f64::max);
        let log = lo > 0.0 && hi / lo > 20.0;
        let (lo, hi) = if log { (lo.ln(), hi.ln()) } else { (lo, hi) };
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
        Self { lo: lo - pad, hi: hi + pad, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.ln() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn value_at(&self, u: f64) -> f64 {
        let v = self.lo + u * (self.hi - self.lo);
        if self.log {
            v.exp()
        } else {
            v
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Minimal line plot; log axes when the data spans more than a factor 20.
pub fn svg_string(series: &[Series]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let all = series.iter().flat_map(|p| p.points.iter().copied()).filter(|p| p.0.is_finite() && p.1.is_finite());
    if all.clone().next().is_none() {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">no quotient data</text>"#, W / 2.0, H / 2.0);
        s.push_str("</svg>\n");
        return s;
    }
    let xa = Axis::fit(all.clone().map(|p| p.0));
    let ya = Axis::fit(all.map(|p| p.1));
    let (x0, x1, y0, y1) = (MARGIN, W - 20.0, H - MARGIN, 20.0);
    let px = |x: f64| x0 + xa.unit(x) * (x1 - x0);
    let py = |y: f64| y0 + ya.unit(y) * (y1 - y0);
    let _ = writeln!(s, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#);
    for i in 0..=4 {
        let u = i as f64 / 4.0;
        let (tx, ty) = (x0 + u * (x1 - x0), y0 + u * (y1 - y0));
        let _ = writeln!(s, r#"<text x="{tx:.1}" y="{:.1}" text-anchor="middle" font-size="10">{:.3e}</text>"#, y0 + 15.0, xa.value_at(u));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ty:.1}" text-anchor="end" font-size="10">{:.3e}</text>"#, x0 - 4.0, ya.value_at(u));
    }
    let x_label = series.first().map(|p| p.x_label.as_str()).unwrap_or("");
    let log_note = |a: &Axis| if a.log { " (log)" } else { "" };
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}{}</text>"#,
        (x0 + x1) / 2.0,
        H - 20.0,
        escape(x_label),
        log_note(&xa)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" font-size="12" transform="rotate(-90 14 {:.1})" text-anchor="middle">quotient{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        log_note(&ya)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts: Vec<(f64, f64)> = ser.points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#, path.join(" "));
        for &(x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(x), py(y));
        }
        let ly = y1 + 14.0 * (i as f64 + 1.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}" font-size="11" fill="{color}" text-anchor="end">{}</text>"#, x1 - 4.0, escape(&ser.name));
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(path: &Path, series: &[Series]) -> io::Result<()> {
    std::fs::write(path, svg_string(series))
}
