use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use exoseries::corpus;
use exoseries::exotic::{ExoticRecord, ExoticSeries};
use exoseries::reduction::{ReducedEquation, ReducedRecord};
use exoseries::scalar::Backend;

fn exo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exoseries"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_corpus(dir: &Path, p: corpus::CorpusProblem) -> (String, String) {
    let ode = dir.join(format!("{}.ode", p.name));
    let series = dir.join(format!("{}.series.json", p.name));
    std::fs::write(&ode, p.ode).unwrap();
    std::fs::write(&series, p.series).unwrap();
    (ode.display().to_string(), series.display().to_string())
}

#[test]
fn verify_linear_and_riccati() {
    for name in ["linear", "riccati"] {
        let out = exo(&["verify", "--corpus", name]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let v = json(&out);
        assert_eq!(v["isSolutionToOrder"], true);
        assert_eq!(v["hypothesis"]["satisfied"], true);
    }
}

#[test]
fn verify_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let (ode, series) = write_corpus(dir.path(), corpus::RICCATI);
    let out = exo(&["verify", "--ode", &ode, "--series", &series]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["hypothesis"]["N"], 0);
}

#[test]
fn corrupted_series_names_the_grade() {
    let dir = tempfile::tempdir().unwrap();
    let (ode, _) = write_corpus(dir.path(), corpus::RICCATI);
    let mut rec: ExoticRecord = serde_json::from_str(corpus::RICCATI.series).unwrap();
    rec.grades[2].series.coeffs[0] = ["3/2".into(), "0".into()];
    let series = dir.path().join("bad.json");
    std::fs::write(&series, serde_json::to_string(&rec).unwrap()).unwrap();
    let out = exo(&["verify", "--ode", &ode, "--series", series.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["isSolutionToOrder"], false);
    assert_eq!(v["hypothesis"]["residualGrade"], 2);
}

#[test]
fn hypothesis_failure_exit_code() {
    let out = exo(&["verify", "--corpus", "riccati_violating"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["hypothesis"]["satisfied"], false);
    let out = exo(&["pipeline", "--corpus", "riccati_violating"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["failedStage"], "verify");
    assert_eq!(v["ok"], false);
}

#[test]
fn parse_reports_and_errors() {
    let out = exo(&["parse", "--corpus", "painleve3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["order"], 2);
    assert_eq!(v["yDegree"], 4);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ode");
    std::fs::write(&bad, "eta = 1\nF = delta(y,1) - * y\n").unwrap();
    let out = exo(&["parse", "--ode", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 18"));
    let out = exo(&["verify", "--ode", "/nonexistent.ode", "--series", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stage_subcommands() {
    let v = json(&exo(&["reduce", "--corpus", "riccati"]));
    assert_eq!(v["mChoice"]["m"], 1);
    assert_eq!(v["reduced"]["r"], 2);
    let v = json(&exo(&["solve", "--corpus", "riccati", "--K", "6"]));
    assert_eq!(v["summary"]["tail"]["mismatchedGrades"], Value::Array(vec![]));
    let v = json(&exo(&["sigma", "--corpus", "riccati"]));
    assert_eq!(v["sigma"], 1.0);
    let out = exo(&["majorant", "--corpus", "riccati", "--tau", "0.3", "--tau-prime", "0.45"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dominance"]["ok"], true);
    assert!(v["Mbound"].as_f64().unwrap() > 0.0);
    assert!(v["radius"].as_f64().unwrap() > 0.0);
}

#[test]
fn evaluate_table_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("grid.svg");
    let out = exo(&[
        "evaluate",
        "--corpus",
        "riccati",
        "--K",
        "30",
        "--theta-min",
        "1.0",
        "--theta-max",
        "2.0",
        "--radius",
        "0.05",
        "--samples",
        "3",
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x_re,x_im,value_re,value_im,q,residual"));
    assert_eq!(lines.count(), 9);
    assert!(std::fs::read_to_string(plot).unwrap().contains("<svg"));
    let out = exo(&["evaluate", "--corpus", "riccati", "--theta-min", "1.0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pipeline_artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = exo(&["pipeline", "--corpus", "riccati", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("pipeline.json")).unwrap()).unwrap();
    assert_eq!(report["ok"], true);
    assert_eq!(report["majorant"]["dominance"]["ok"], true);
    assert!(report["sector"]["convergent"].as_u64().unwrap() > 0);
    for (_, file) in report["artifacts"].as_object().unwrap() {
        let name = file.as_str().unwrap();
        assert!(!name.contains('/'), "artifact paths are relative file names");
        assert!(out_dir.join(name).exists());
    }
    let text = std::fs::read_to_string(out_dir.join("reduced.json")).unwrap();
    let rec: ReducedRecord = serde_json::from_str(&text).unwrap();
    let eq = ReducedEquation::from_record(&rec, Backend::Exact).unwrap();
    assert_eq!(eq.to_record(), rec);
    let text = std::fs::read_to_string(out_dir.join("solution.json")).unwrap();
    let rec: ExoticRecord = serde_json::from_str(&text).unwrap();
    let psi = ExoticSeries::from_record(&rec, Backend::Exact).unwrap();
    assert_eq!(psi.to_record(), rec);
}

#[test]
fn pipeline_linear_and_float_mode() {
    let out = exo(&["pipeline", "--corpus", "linear"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reduced"]["mTerms"], 0);
    assert_eq!(v["majorant"]["mBound"]["value"], 0.0);
    let out = exo(&["--mode", "float", "--precision", "96", "pipeline", "--corpus", "riccati"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["mode"], "float");
    assert_eq!(v["sigma"]["sigma"], 1.0);
}

#[test]
fn pipeline_is_deterministic() {
    let a = exo(&["pipeline", "--corpus", "riccati"]);
    let b = exo(&["pipeline", "--corpus", "riccati"]);
    assert_eq!(a.stdout, b.stdout);
}
