use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn qgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Closed box: two fully reflecting vertices on a very short edge. Its bound
/// states are so narrow that the limit offsets are singular too.
const CLOSED_BOX: &str = r#"{
  "vertices": [
    {"id": 1, "bc": {"custom": [[{"re": 1, "im": 0}, {"re": 0, "im": 0}], [{"re": 0, "im": 0}, {"re": 1, "im": 0}]]}},
    {"id": 2, "bc": {"custom": [[{"re": 1, "im": 0}, {"re": 0, "im": 0}], [{"re": 0, "im": 0}, {"re": 1, "im": 0}]]}}
  ],
  "edges": [{"from": 1, "to": 2, "length": 0.001}],
  "leads": [{"vertex": 1}, {"vertex": 2}]
}"#;

#[test]
fn sweep_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c3.csv");
    let out = qgraph(&[
        "sweep", "--graph", "c3", "--kl-min", "0.001", "--kl-max", "6.28218", "--samples", "2001",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kl,re_t,im_t,t2,r2"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2001);
    assert_eq!(rows[0][0], 0.001);
    assert_eq!(rows[2000][0], 6.28218);
    for r in &rows {
        assert!((r[3] + r[4] - 1.0).abs() < 1e-10);
        assert!((r[1] * r[1] + r[2] * r[2] - r[3]).abs() < 1e-12);
    }
}

#[test]
fn hitting_time_of_c4() {
    for method in ["series", "quadrature"] {
        let out = qgraph(&["hitting", "--graph", "c4", "--method", method]);
        assert!(out.status.success(), "{}", stderr(&out));
        let text = stdout(&out);
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        let h: f64 = row[1].parse().unwrap();
        assert!((h - 155.0 / 72.0).abs() < 1e-6, "{method}: {h}");
    }
}

#[test]
fn peaks_of_c3_c4_c3_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("peaks.json");
    let out = qgraph(&[
        "peaks", "--graph", "c3+c4+c3", "--resolution", "1e-4", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let peaks: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(peaks.len(), 4);
    let mut offsets: Vec<f64> = peaks
        .iter()
        .map(|p| (p["center"].as_f64().unwrap() - PI).abs())
        .collect();
    offsets.sort_by(f64::total_cmp);
    for (found, want) in offsets.iter().zip([0.43440, 0.43440, 1.12611, 1.12611]) {
        assert!((found - want).abs() < 1e-3, "{found} vs {want}");
    }
    for p in &peaks {
        assert!(p["height"].as_f64().unwrap() > 0.99);
        let band = p["band"].as_array().unwrap();
        let c = p["center"].as_f64().unwrap();
        assert!(band[0].as_f64().unwrap() < c && c < band[1].as_f64().unwrap());
    }
}

#[test]
fn walk_coefficients_of_c3() {
    let out = qgraph(&["walk", "--graph", "c3", "--order", "4", "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 5);
    let p1 = rows[1]["p"].as_f64().unwrap();
    assert!((p1 - 16.0 / 81.0).abs() < 1e-14);
}

#[test]
fn walk_methods_agree() {
    let parse = |method: &str| -> Vec<f64> {
        let out = qgraph(&["walk", "--graph", "c3-c4", "--order", "60", "--method", method]);
        assert!(out.status.success(), "{}", stderr(&out));
        stdout(&out)
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect()
    };
    let (a, b) = (parse("recurrence"), parse("power"));
    assert_eq!(a.len(), 61);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn transmit_matches_sweep_point() {
    let out = qgraph(&["transmit", "--graph", "c4", "--kl", "1.5", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let t2 = v["t2"].as_f64().unwrap();
    let r2 = v["r2"].as_f64().unwrap();
    assert!((t2 + r2 - 1.0).abs() < 1e-12);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_qgraph"))
            .args(["sweep", "--graph", "c3+c3", "--samples", "4001", "--out"])
            .arg(&path)
            .env("QGRAPH_THREADS", if name == "a.csv" { "1" } else { "4" })
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(&path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
    let peaks = || stdout(&qgraph(&["peaks", "--graph", "c4+c4", "--resolution", "5e-4"]));
    assert_eq!(peaks(), peaks());
}

#[test]
fn length_scale_rescales_the_spectrum() {
    let get = |args: &[&str]| -> f64 {
        let text = stdout(&qgraph(args));
        text.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap()
    };
    let base = get(&["transmit", "-g", "c3", "--kl", "1.2"]);
    let scaled = get(&["transmit", "-g", "c3", "--kl", "0.6", "--length-scale", "2"]);
    assert!((base - scaled).abs() < 1e-12);
}

#[test]
fn graph_spec_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, qgraph_spec_for_c3()).unwrap();
    let from_file = stdout(&qgraph(&["transmit", "-g", path.to_str().unwrap(), "--kl", "0.7"]));
    let preset = stdout(&qgraph(&["transmit", "-g", "c3", "--kl", "0.7"]));
    assert_eq!(from_file, preset);
}

fn qgraph_spec_for_c3() -> &'static str {
    r#"{
  "vertices": [{"id": 1, "bc": "nk"}, {"id": 2, "bc": "nk"}, {"id": 3, "bc": "nk"}],
  "edges": [{"from": 1, "to": 2}, {"from": 2, "to": 3}, {"from": 3, "to": 1}],
  "leads": [{"vertex": 1}, {"vertex": 2}]
}"#
}

#[test]
fn validate_reports_violations() {
    let ok = qgraph(&["validate", "--graph", "c3*c4"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("valid"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"vertices": [{"id": 1, "bc": "nk"}, {"id": 2, "bc": "nk"}, {"id": 3, "bc": "nk"}],
            "edges": [{"from": 1, "to": 2, "length": -1}],
            "leads": [{"vertex": 1}, {"vertex": 2}]}"#,
    )
    .unwrap();
    let bad = qgraph(&["validate", "--graph", path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    assert!(text.contains("invalid"), "{text}");
    assert!(text.lines().count() >= 2, "{text}");
}

#[test]
fn usage_errors_exit_with_one_and_name_the_field() {
    let cases: [(&[&str], &str); 5] = [
        (&["sweep", "--graph", "c2"], "--graph"),
        (&["sweep", "--graph", "c3", "--kl-min", "-1"], "kl-min"),
        (&["sweep", "--graph", "c3", "--kl-min", "2", "--kl-max", "1"], "kl-max"),
        (&["hitting", "--graph", "c3", "--tolerance", "0"], "--tolerance"),
        (&["transmit", "--graph", "missing/graph.json", "--kl", "1"], "--graph"),
    ];
    for (args, field) in cases {
        let out = qgraph(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(stderr(&out).contains(field), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(qgraph(&["sweep"]).status.code(), Some(1));
    assert_eq!(qgraph(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qgraph(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_spec_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.json");
    std::fs::write(&path, r#"{"vertices": [], "edgez": []}"#).unwrap();
    let out = qgraph(&["validate", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("edgez"), "{}", stderr(&out));
}

#[test]
fn numerical_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("box.json");
    std::fs::write(&path, CLOSED_BOX).unwrap();
    let kl = (1000.0 * PI).to_string();
    let out = qgraph(&["transmit", "--graph", path.to_str().unwrap(), "--kl", &kl]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("singularity"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_qgraph"))
        .args(["transmit", "-g", "c3", "--kl", "1"])
        .env("QGRAPH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("QGRAPH_THREADS"));
}

#[test]
fn output_directory_keeps_only_the_result() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    assert!(qgraph(&["walk", "-g", "c4", "--out", path.to_str().unwrap()]).status.success());
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![Path::new("w.csv").as_os_str().to_owned()]);
}
