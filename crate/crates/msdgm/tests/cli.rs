use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use msdgm::formats::graph_from_json;

fn msdgm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msdgm")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = msdgm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate_to(dir: &Path, spec_json: &str, name: &str) -> std::path::PathBuf {
    let spec = dir.join(format!("{name}.json"));
    fs::write(&spec, spec_json).unwrap();
    let out = dir.join(format!("{name}.csv"));
    ok(&["simulate", "--spec", s(&spec), "--out", s(&out)]);
    out
}

const COUPLED: &str =
    r#"{"num_types": 4, "points_per_type": 120, "seed": 11, "couplings": [{"source": 0, "target": 2, "rho": 0.9, "sigma": 0.01}]}"#;

#[test]
fn simulate_is_deterministic_and_reports_truth() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, COUPLED).unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let stdout = ok(&["simulate", "--spec", s(&spec), "--out", s(&a)]);
    ok(&["simulate", "--spec", s(&spec), "--out", s(&b)]);
    assert_eq!(stdout.trim(), "t1 -- t3");
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().next().unwrap(), "x,y,type,mark");
    assert_eq!(text.lines().count(), 1 + 4 * 120);
}

#[test]
fn analyze_writes_all_artifacts_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulate_to(dir.path(), COUPLED, "coupled");
    let mut runs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}"));
        let listed = ok(&["analyze", "--input", s(&input), "--out-dir", s(&out), "--threads", threads]);
        assert_eq!(listed.lines().count(), 8);
        let mut names: Vec<String> =
            fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        names.sort();
        assert_eq!(names.iter().filter(|n| n.ends_with(".dot")).count(), 3);
        assert_eq!(names.iter().filter(|n| n.ends_with(".json") && n.starts_with("msdgm_alpha")).count(), 3);
        assert!(names.contains(&"edge_statistics.csv".to_string()));
        assert!(names.contains(&"report.json".to_string()));
        let contents: Vec<(String, Vec<u8>)> = names
            .iter()
            .filter(|n| n.as_str() != "report.json")
            .map(|n| (n.clone(), fs::read(out.join(n)).unwrap()))
            .collect();
        runs.push((out, contents));
    }
    assert_eq!(runs[0].1, runs[1].1);
    assert_eq!(runs[0].1, runs[2].1);

    let out = &runs[0].0;
    let g = graph_from_json(&fs::read_to_string(out.join("msdgm_alpha_0.3.json")).unwrap()).unwrap();
    assert!(g.has_edge(0, 2));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["points"], 480);
    assert_eq!(report["types"].as_array().unwrap().len(), 4);
    assert_eq!(report["bandwidth"], 2);
    assert!(report["elapsed_ms"].is_u64());
}

#[test]
fn one_type_input_is_rejected_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("one.csv");
    fs::write(&input, "x,y,type,mark\n0.1,0.2,a,1\n0.5,0.9,a,2\n0.7,0.3,a,4\n").unwrap();
    let out = dir.path().join("out");
    let res = msdgm(&["analyze", "--input", s(&input), "--out-dir", s(&out)]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("error"));
    assert!(!out.exists() || fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn bad_rows_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "x,y,type,mark\n0.1,0.2,a,1\n0.5,NA,b,2\n").unwrap();
    let res = msdgm(&["analyze", "--input", s(&input), "--out-dir", s(&dir.path().join("o"))]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 3"));
}

#[test]
fn custom_columns_and_tab_delimiter() {
    let dir = tempfile::tempdir().unwrap();
    let csv_input = simulate_to(dir.path(), r#"{"num_types": 3, "points_per_type": 40, "seed": 2}"#, "ind");
    let tsv: String = fs::read_to_string(&csv_input)
        .unwrap()
        .lines()
        .enumerate()
        .map(|(i, l)| if i == 0 { "east\tnorth\tspecies\tdbh\n".to_string() } else { l.replace(',', "\t") + "\n" })
        .collect();
    let input = dir.path().join("ind.tsv");
    fs::write(&input, tsv).unwrap();
    let out = dir.path().join("out");
    ok(&[
        "analyze", "--input", s(&input), "--out-dir", s(&out), "--tab", "--x-col", "east", "--y-col", "north",
        "--type-col", "species", "--mark-col", "dbh", "--thresholds", "0.5",
    ]);
    assert!(out.join("msdgm_alpha_0.5.dot").exists());
    let stats = fs::read_to_string(out.join("edge_statistics.csv")).unwrap();
    assert_eq!(stats.lines().count(), 4);
}

#[test]
fn invalid_threshold_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulate_to(dir.path(), r#"{"num_types": 2, "points_per_type": 20, "seed": 1}"#, "p");
    let res = msdgm(&["analyze", "--input", s(&input), "--out-dir", s(&dir.path().join("o")), "--thresholds", "1.0"]);
    assert!(!res.status.success());
}

#[test]
fn recovery_study_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, COUPLED).unwrap();
    let rows = dir.path().join("rows.csv");
    let summary = dir.path().join("summary.csv");
    let stdout = ok(&[
        "recovery-study", "--spec", s(&spec), "--replicates", "3", "--out", s(&rows), "--summary", s(&summary),
    ]);
    assert_eq!(fs::read_to_string(&rows).unwrap().lines().count(), 1 + 3 * 3);
    assert_eq!(fs::read_to_string(&summary).unwrap(), stdout);
    assert_eq!(stdout.lines().count(), 4);
}

#[test]
fn spectra_dump_variants() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulate_to(dir.path(), r#"{"num_types": 3, "points_per_type": 50, "seed": 5}"#, "p");
    let raw = dir.path().join("raw.csv");
    let smoothed = dir.path().join("smoothed.csv");
    let partial = dir.path().join("partial.csv");
    let base = ["spectra", "dump", "--input", s(&input), "--p-max", "4", "--q-max", "4"];
    ok(&[&base[..], &["--out", s(&raw)]].concat());
    ok(&[&base[..], &["--smoothed", "--out", s(&smoothed)]].concat());
    ok(&[&base[..], &["--partial", "--out", s(&partial)]].concat());
    let lattice = 5 * 8;
    assert_eq!(fs::read_to_string(&raw).unwrap().lines().count(), 1 + lattice * 9);
    assert_eq!(fs::read_to_string(&smoothed).unwrap().lines().count(), 1 + lattice * 9);
    // usable non-DC frequencies, three pairs each
    assert_eq!(fs::read_to_string(&partial).unwrap().lines().count(), 1 + (lattice - 1) * 3);
    assert_ne!(fs::read(&raw).unwrap(), fs::read(&smoothed).unwrap());
}
