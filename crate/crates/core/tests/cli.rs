use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dictgreedy::cli::config::ExperimentConfig;
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dictgreedy"))
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn quadratic_config(name: &str) -> Value {
    json!({
        "version": 1,
        "name": name,
        "space": {"n": 2, "q": 2.0},
        "energy": {"kind": "quadratic", "operator": "identity", "source": {"values": [3.0, 4.0]}},
        "dictionary": {"kind": "axes"},
        "analysis": {"trials": 1000},
        "output": {"trace_path": format!("{name}.csv"), "report_path": format!("{name}.json.out")}
    })
}

fn write_config(dir: &Path, file: &str, cfg: &Value) -> PathBuf {
    let path = dir.join(file);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

#[test]
fn quadratic_axes_run_passes_with_closed_form_trace() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["run", bundled("quadratic_axes").to_str().unwrap(), "--out-dir", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let mut rd = csv::Reader::from_path(out.path().join("out/quadratic_axes.trace.csv")).unwrap();
    let gaps: Vec<f64> = rd.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(gaps, vec![12.5, 4.5, 0.0]);

    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("out/quadratic_axes.report.json")).unwrap())
            .unwrap();
    let keys: Vec<&str> = report.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 6);
    for k in ["config", "estimates", "norming", "checks", "rate", "verdict"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(report["verdict"]["pass"], json!(true));
    for check in ["monotone", "one_step_bound", "orthogonality", "telescoping", "iterate_error"] {
        assert_eq!(report["checks"][check]["pass"], json!(true), "{check}");
    }
    // The echoed config re-parses and re-validates.
    let echoed = ExperimentConfig::from_json(&report["config"].to_string()).unwrap();
    let original = ExperimentConfig::load(&bundled("quadratic_axes")).unwrap();
    assert_eq!(echoed, original);
    assert!(out.path().join("out/quadratic_axes.svg").exists());
}

#[test]
fn reports_use_seventeen_significant_digits() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["run", bundled("quadratic_axes").to_str().unwrap(), "--out-dir", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out.path().join("out/quadratic_axes.report.json")).unwrap();
    assert!(text.contains("\"q\": 2.0000000000000000e0"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for name in ["power_cone", "subspace_blocks"] {
        for d in [&a, &b] {
            let o = run(&["run", bundled(name).to_str().unwrap(), "--out-dir", d.path().to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        }
        for ext in ["trace.csv", "report.json", "svg"] {
            let f = format!("out/{name}.{ext}");
            assert_eq!(std::fs::read(a.path().join(&f)).unwrap(), std::fs::read(b.path().join(&f)).unwrap(), "{f}");
        }
    }
}

#[test]
fn power_exponent_mismatch_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "version": 1, "name": "bad",
        "space": {"n": 4, "q": 2.0},
        "energy": {"kind": "power", "p": 0.5, "target": {"constant": 1.0}},
        "dictionary": {"kind": "axes"},
        "output": {"trace_path": "t.csv", "report_path": "r.json"}
    });
    let path = write_config(dir.path(), "bad.json", &cfg);
    let o = run(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("space.q"), "{}", stderr(&o));
    assert!(!dir.path().join("t.csv").exists());
}

#[test]
fn declared_s_below_p_plus_one_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quadratic_config("low_s");
    cfg["declared"] = json!({"p": 1.0, "s": 1.5});
    let path = write_config(dir.path(), "low_s.json", &cfg);
    let o = run(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s >= p + 1"), "{}", stderr(&o));
}

#[test]
fn unknown_keys_and_bad_usage_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quadratic_config("extra");
    cfg["surprise"] = json!(1);
    let path = write_config(dir.path(), "extra.json", &cfg);
    assert_eq!(run(&["run", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["run", "/nonexistent/config.json"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn invariant_failure_exits_1_and_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quadratic_config("tiny_lip");
    // A Hölder constant far below the true one promises too much decrease.
    cfg["declared"] = json!({"p": 1.0, "s": 2.0, "lip": 0.01, "alpha": 1.0, "mode": "global"});
    let path = write_config(dir.path(), "tiny_lip.json", &cfg);
    let o = run(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("tiny_lip.json.out")).unwrap()).unwrap();
    assert_eq!(report["verdict"]["pass"], json!(false));
    assert!(report["verdict"]["failed"].as_array().unwrap().contains(&json!("one_step_bound")));
}

fn summary_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

#[test]
fn sweep_of_three_passing_configs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b", "c"] {
        write_config(dir.path(), &format!("{name}.json"), &quadratic_config(name));
    }
    let o = run(&["sweep", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = summary_rows(&dir.path().join("sweep_summary.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[1] == "pass"));
    assert_eq!(rows.iter().map(|r| r[0].to_string()).collect::<Vec<_>>(), ["a.json", "b.json", "c.json"]);
}

#[test]
fn sweep_with_one_failure_exits_1_with_all_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        write_config(dir.path(), &format!("{name}.json"), &quadratic_config(name));
    }
    let mut bad = quadratic_config("c");
    bad["declared"] = json!({"p": 1.0, "s": 2.0, "lip": 0.01, "alpha": 1.0, "mode": "global"});
    write_config(dir.path(), "c.json", &bad);
    let o = run(&["sweep", dir.path().to_str().unwrap(), "--out-dir", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let rows = summary_rows(&out.path().join("sweep_summary.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().filter(|r| &r[1] == "fail").count(), 1);
}

#[test]
fn sweep_of_empty_directory_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["sweep", dir.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn plot_structure_and_degenerate_cases() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", bundled("quadratic_axes").to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let trace = dir.path().join("out/quadratic_axes.trace.csv");
    let svg_path = dir.path().join("plot.svg");
    let o = run(&["plot", trace.to_str().unwrap(), svg_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert_eq!(svg.matches("class=\"overlay\"").count(), 1);
    assert!(!svg.contains("NaN") && !svg.contains("inf"));
    // Plotting the same trace again gives the same bytes.
    let again = dir.path().join("again.svg");
    run(&["plot", trace.to_str().unwrap(), again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&svg_path).unwrap(), std::fs::read(&again).unwrap());

    let text = std::fs::read_to_string(&trace).unwrap();
    let single: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
    let single_path = dir.path().join("single.csv");
    std::fs::write(&single_path, single).unwrap();
    let o = run(&["plot", single_path.to_str().unwrap(), dir.path().join("s.svg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("degenerate"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "m,energy\n0,1\n").unwrap();
    assert_eq!(run(&["plot", bad.to_str().unwrap(), dir.path().join("b.svg").to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, text.replace("4.5000000000000000e0", "four")).unwrap();
    assert_eq!(run(&["plot", bad.to_str().unwrap(), dir.path().join("b.svg").to_str().unwrap()]).status.code(), Some(2));
}
