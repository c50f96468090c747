//! End-to-end checks of the command-line interface: exit codes, file
//! formats, determinism, and the validation report schema.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_catalynet")
}

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &serde_json::Value) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(json).unwrap()).unwrap();
    path
}

fn sweep_config(out: &str) -> serde_json::Value {
    serde_json::json!({
        "probe": {"family": "cwc", "amplitude": 1.0, "theta": 0.2, "m": 2, "d": 3, "s": 0},
        "sweep": {"parameter": "theta", "start": 0.1, "stop": 1.3, "count": 7, "spacing": "linear"},
        "outputs": ["H", "N_bar", "P", "G"],
        "reference": {"family": "wc", "amplitude": 1.0, "d": 3},
        "out": out,
        "format": "csv"
    })
}

#[test]
fn sweep_writes_csv_with_header_and_grid_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &sweep_config("out.csv"));
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,H,N_bar,P,G");
    assert_eq!(lines.len(), 1 + 7, "header plus one row per grid point");
    // byte-reproducible on rerun
    let first = text.clone();
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    assert_eq!(first, std::fs::read_to_string(dir.path().join("out.csv")).unwrap());
}

#[test]
fn sweep_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &sweep_config("a.csv"));
    let out = run(
        &["sweep", "--config", cfg.to_str().unwrap(), "--m", "3", "--out", "b.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("b.csv").exists());
    let a = run(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(a.status.success());
    let base = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let overridden = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_ne!(base, overridden, "different m must change the metrics");
}

#[test]
fn sweep_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // G requested without a reference block
    let mut cfg_json = sweep_config("x.csv");
    cfg_json["reference"] = serde_json::Value::Null;
    let cfg = write_config(dir.path(), "bad.json", &cfg_json);
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // malformed JSON
    std::fs::write(dir.path().join("broken.json"), "{ not json").unwrap();
    let out = run(&["sweep", "--config", "broken.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // missing file
    let out = run(&["sweep", "--config", "nope.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_domain_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    // theta sweep into the degenerate-catalysis guard band
    let mut cfg_json = sweep_config("x.csv");
    cfg_json["sweep"]["stop"] = serde_json::json!(std::f64::consts::FRAC_PI_2 - 1e-8);
    let cfg = write_config(dir.path(), "cfg.json", &cfg_json);
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn figure_s2_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["figure", "figS2", "--out", "figs"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("figs/figS2/single_mode_qfi.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "m,f_cat_coherent,f_coherent,f_cat_squeezed,f_squeezed");
    assert_eq!(lines.len(), 1 + 21);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("figs/figS2/sidecar.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["figure"], "figS2");
    assert!(dir.path().join("figs/figS2/plot.gp").exists());

    let out = run(&["figure", "fig99"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure_fig15_annotations() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["figure", "fig15", "--out", "figs"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("figs/fig15/sidecar.json")).unwrap())
            .unwrap();
    let eta_g = sidecar["details"]["critical_eta"]["global"].as_f64().unwrap();
    let eta_p = sidecar["details"]["critical_eta"]["partial"].as_f64().unwrap();
    assert!((eta_g - 0.8044).abs() < 0.002, "global critical eta {eta_g}");
    assert!((eta_p - 0.8970).abs() < 0.002, "partial critical eta {eta_p}");
    let csv = std::fs::read_to_string(dir.path().join("figs/fig15/panel_a_coherent.csv")).unwrap();
    assert!(csv.starts_with("eta,h_wc_l,h_cwc_l,h_pcwc_l"));
    assert_eq!(csv.lines().count(), 1 + 200);
}

#[test]
fn optimize_modes_matches_published_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["optimize", "modes", "--family", "pcwc", "--d", "20", "--m", "5", "--n-resource", "1"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["optimum"]["s_opt"], 9);
    assert_eq!(report["grid"].as_array().unwrap().len(), 21);
}

#[test]
fn optimize_lesr_reports_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["optimize", "lesr", "--family", "cwc", "--d", "20", "--m", "15", "--n-resource", "0.5"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let intervals = report["intervals"].as_array().unwrap();
    assert_eq!(intervals.len(), 1);
    let from = intervals[0]["theta_from"].as_f64().unwrap();
    assert!((from - 0.694).abs() < 0.01);
}

/// Structural validation of the report against the published schema:
/// every required field exists with the declared primitive type.
fn assert_matches_schema(value: &serde_json::Value, schema: &serde_json::Value) {
    let required = schema["required"].as_array().expect("schema lists required fields");
    for field in required {
        let name = field.as_str().unwrap();
        assert!(!value[name].is_null(), "missing required field {name}");
    }
    for (name, prop) in schema["properties"].as_object().unwrap() {
        let v = &value[name];
        if v.is_null() {
            continue;
        }
        match prop["type"].as_str() {
            Some("string") => assert!(v.is_string(), "{name} must be a string"),
            Some("number") => assert!(v.is_number(), "{name} must be a number"),
            Some("integer") => assert!(v.is_i64() || v.is_u64(), "{name} must be an integer"),
            Some("boolean") => assert!(v.is_boolean(), "{name} must be a boolean"),
            Some("array") => assert!(v.is_array(), "{name} must be an array"),
            _ => {}
        }
    }
}

#[test]
fn validate_fast_passes_and_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["validate", "--level", "fast", "--out", "report.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/validation-report.schema.json");
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    assert_matches_schema(&report, &schema);
    for q in report["quantities"].as_array().unwrap() {
        assert!(q["worst_rel_err"].as_f64().unwrap() <= 1e-8);
    }
}
