use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_orlicz-lab"));
    c.env_remove("ORLICZ_LAB_OUTPUT_DIR");
    c
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// The subset of JSON Schema used by the shipped schema.
fn conforms(v: &Value, schema: &Value, at: &str) -> Result<(), String> {
    if let Some(t) = schema.get("type") {
        let types: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(|x| x.as_str()).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "null" => v.is_null(),
            "number" => v.is_number(),
            _ => false,
        });
        if !ok {
            return Err(format!("{at}: expected {types:?}"));
        }
    }
    if let Some(Value::Array(options)) = schema.get("enum") {
        if !options.contains(v) {
            return Err(format!("{at}: {v} not in enum"));
        }
    }
    if let (Some(Value::Array(req)), Some(obj)) = (schema.get("required"), v.as_object()) {
        for k in req.iter().filter_map(|k| k.as_str()) {
            if !obj.contains_key(k) {
                return Err(format!("{at}: missing {k}"));
            }
        }
    }
    if let (Some(Value::Object(props)), Some(obj)) = (schema.get("properties"), v.as_object()) {
        for (k, sub) in props {
            if let Some(x) = obj.get(k) {
                conforms(x, sub, &format!("{at}.{k}"))?;
            }
        }
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            if let Some(k) = obj.keys().find(|k| !props.contains_key(*k)) {
                return Err(format!("{at}: unexpected key {k}"));
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            conforms(x, items, &format!("{at}[{i}]"))?;
        }
    }
    Ok(())
}

#[test]
fn indices_report_matches_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin().args(["indices", "--phi", "t^2+t^4", "-o"]).arg(dir.path()).status().unwrap();
    assert!(st.success());
    let doc = read_json(&dir.path().join("report.json"));
    let schema: Value = serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    conforms(&doc, &schema, "$").unwrap();
    let r = &doc["reports"][0];
    assert!((r["p_minus"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert!((r["p_plus"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    assert!(dir.path().join("report.csv").exists());
    assert!(std::fs::read_to_string(dir.path().join("plot.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin().args(["indices", "--phi", "t^3", "-o"]).arg(dir.path()).status().unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let mut floats = 0;
    for tok in text.split(|c: char| c.is_whitespace() || c == ',' || c == ':' || c == '[' || c == ']') {
        if tok.contains('e') && tok.parse::<f64>().is_ok() && !tok.starts_with('"') {
            let mantissa = tok.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.replace('.', "").len(), 17, "{tok}");
            floats += 1;
        }
    }
    assert!(floats > 5);
}

#[test]
fn counterexample_rows_clear_the_analytic_bound() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin().args(["counterexample", "--p", "1.5", "--q", "3", "--n", "8,16,32,64", "-o"]).arg(dir.path()).status().unwrap();
    assert!(st.success());
    let mut rd = csv::Reader::from_path(dir.path().join("report.csv")).unwrap();
    let header = rd.headers().unwrap().clone();
    assert_eq!(header.get(0), Some("command"));
    assert_eq!(header.get(13), Some("region_annotation"));
    let ns = [8.0f64, 16.0, 32.0, 64.0];
    let rows: Vec<_> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for (row, n) in rows.iter().zip(ns) {
        let lhs: f64 = row[8].parse().unwrap();
        assert!(lhs >= 2.0 * (n / 2.0).ln() - 1e-3, "n={n}: {lhs}");
        assert!(row[12].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn malformed_expression_exits_with_one_and_a_caret() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["indices", "--phi", "t^2+*t", "-o"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("position 4"), "{err}");
    let caret_line = err.lines().find(|l| l.trim() == "^").unwrap();
    let src_line = err.lines().find(|l| l.trim() == "t^2+*t").unwrap();
    assert_eq!(caret_line.find('^').unwrap() - src_line.find('t').unwrap(), 4);
}

#[test]
fn missing_required_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["hardy", "--phi", "t^2", "-o"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--family"));
    let out = bin().args(["indices", "--phi", "t^2", "--threads", "0", "-o"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn flags_override_the_config_file_and_env_sets_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "hardy", "phi": "t^3", "s": 0.5, "family": {"kind": "Bump", "radius": 1.0}, "formats": ["csv"]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("from-env");
    let st = bin()
        .arg("--config")
        .arg(&cfg)
        .args(["--phi", "t^2", "--s", "0.4"])
        .env("ORLICZ_LAB_OUTPUT_DIR", &out_dir)
        .status()
        .unwrap();
    assert!(st.success());
    assert!(!out_dir.join("report.json").exists());
    let mut rd = csv::Reader::from_path(out_dir.join("report.csv")).unwrap();
    let row = rd.records().next().unwrap().unwrap();
    assert_eq!(&row[0], "hardy");
    assert_eq!(&row[1], "t^2");
    assert_eq!(row[3].parse::<f64>().unwrap(), 0.4);
    assert_eq!(&row[13], "holds");
}

#[test]
fn sweep_gamma_writes_one_series_per_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .args([
            "sweep-gamma",
            "--phi",
            "t^2",
            "--s",
            "0.5",
            "--gammas",
            "0.3,0.45",
            "--family",
            r#"{"kind":"Dilations","base":{"kind":"Bump","radius":1.0},"lambdas":[1.0,2.0]}"#,
            "-o",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let svg = std::fs::read_to_string(dir.path().join("plot.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    let doc = read_json(&dir.path().join("report.json"));
    assert_eq!(doc["reports"].as_array().unwrap().len(), 2);
    assert_eq!(doc["reports"][1]["verdict"], "Bounded");
}

#[test]
fn failure_witness_and_log_hardy_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin().args(["failure-witness", "--phi", "t^2", "--s", "0.5", "-o"]).arg(dir.path()).status().unwrap();
    assert!(st.success());
    let doc = read_json(&dir.path().join("report.json"));
    assert_eq!(doc["reports"][0]["witness"]["lhs"]["growth_model"]["model"], "Log");

    let st = bin()
        .args([
            "log-hardy",
            "--phi",
            "t^2",
            "--case",
            "origin",
            "--family",
            r#"{"kind":"ShrinkToOrigin","radius":1.0,"scales":[0.5,0.25,0.125]}"#,
            "-o",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let doc = read_json(&dir.path().join("report.json"));
    assert_eq!(doc["reports"][0]["verdict"], "Bounded");
}
