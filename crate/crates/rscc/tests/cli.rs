use std::path::Path;
use std::process::{Command, Output};

fn rscc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rscc")).args(args).output().expect("spawn rscc")
}

fn rscc_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rscc"))
        .args(args)
        .env("RSCC_THREADS", threads)
        .output()
        .expect("spawn rscc")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).expect("JSON output")
}

/// Data lines of a CSV document, without the provenance comment.
fn csv_records(text: &str) -> Vec<Vec<String>> {
    let body = text.split_once("\r\n").expect("comment line").1;
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| r.expect("record").iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn kernel_at_state_two() {
    let v = json(&rscc(&["kernel", "--scenario", "jump-annulus", "--state", "2", "--depth", "2"]));
    assert_eq!(v["certificate"]["verdict"], "EmptyAtDepth");
    assert_eq!(v["certificate"]["depth"], 2);
    assert_eq!(v["certificate"]["text"], "EmptyAtDepth(2)");
    assert_eq!(v["provenance"]["scenario"], "jump-annulus");
}

#[test]
fn radial_julia_has_the_annulus_class() {
    let out = stdout(&rscc(&["julia-radial", "--scenario", "jump-annulus"]));
    assert!(out.starts_with("# scenario=jump-annulus seed=0"));
    let rows = csv_records(&out);
    let two = rows.iter().find(|r| r[0] == "Two").expect("class Two");
    let r: Vec<f64> = two[4..6].iter().map(|t| t.parse().unwrap()).collect();
    assert!((r[0] - 1.0).abs() <= 1e-8 && (r[1] - 2.0).abs() <= 1e-8, "{two:?}");
}

#[test]
fn simulate_from_the_absorbing_state() {
    let out = stdout(&rscc(&["simulate", "--scenario", "jump-annulus", "--state", "0", "--steps", "5", "--seed", "7"]));
    let rows = csv_records(&out);
    let indices: Vec<&str> = rows.iter().filter(|r| r.len() > 2 && !r[2].is_empty()).map(|r| r[2].as_str()).collect();
    assert_eq!(indices, ["x1"; 5]);
}

#[test]
fn simulate_is_reproducible_and_seed_dependent() {
    let args = ["simulate", "--scenario", "reinforcement", "--state", "0.5", "--steps", "40", "--maps", "--seed", "3"];
    assert_eq!(stdout(&rscc(&args)), stdout(&rscc(&args)));
    let mut other = args;
    other[9] = "4";
    assert_ne!(stdout(&rscc(&args)), stdout(&rscc(&other)));
}

#[test]
fn words_lists_probabilities() {
    let out = stdout(&rscc(&["words", "--scenario", "jump-annulus", "--state", "1", "--depth", "3"]));
    let total: f64 = out
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit('\t').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() <= 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(rscc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rscc(&["kernel", "--scenario", "no-such-scenario", "--state", "1"]).status.code(), Some(2));
    assert_eq!(rscc(&["kernel", "--scenario", "jump-annulus", "--state", "banana"]).status.code(), Some(2));
    assert_eq!(rscc(&["words", "--scenario", "gdms-demo", "--state", "v0", "--depth", "30"]).status.code(), Some(3));
    let bad_threads = rscc_threads("0", &["julia-grid", "--scenario", "jump-annulus", "--state", "2", "--res", "8"]);
    assert_eq!(bad_threads.status.code(), Some(2));
    assert!(!bad_threads.stderr.is_empty());
    assert_eq!(rscc(&["--help"]).status.code(), Some(0));
}

fn grid_args<'a>(out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["julia-grid", "--scenario", "jump-annulus", "--state", "1", "--res", "48", "--seed", "9", "--out", out];
    v.extend_from_slice(extra);
    v
}

#[test]
fn grids_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    for extra in [&[][..], &["--path"][..]] {
        let a = dir.path().join("a.txt");
        let b = dir.path().join("b.txt");
        assert!(rscc_threads("1", &grid_args(a.to_str().unwrap(), extra)).status.success());
        assert!(rscc_threads("3", &grid_args(b.to_str().unwrap(), extra)).status.success());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn render_matches_inline_ppm() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("g.txt");
    let inline = dir.path().join("inline.ppm");
    let rendered = dir.path().join("nested/rendered.ppm");
    let g = grid.to_str().unwrap();
    assert!(rscc(&grid_args(g, &["--ppm", inline.to_str().unwrap(), "--palette", "heat"])).status.success());
    let o = rscc(&["render", "--grid", g, "--palette", "heat", "--out", rendered.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(&rendered).unwrap();
    assert_eq!(bytes, std::fs::read(&inline).unwrap());
    assert!(bytes.starts_with(b"P6\n# scenario=jump-annulus seed=9"));
    assert!(std::fs::read_to_string(&grid).unwrap().starts_with("# scenario=jump-annulus seed=9"));
}

#[test]
fn jump_verdicts() {
    let v = json(&rscc(&["jump", "--scenario", "jump-annulus", "--state", "1", "--drive", "forced:x1", "--steps", "50"]));
    assert_eq!(v["verdict"], "JumpDetected");
    let v = json(&rscc(&["jump", "--scenario", "gdms-demo", "--state", "v0", "--seed", "2"]));
    assert_eq!(v["verdict"], "NoJumpWithinHorizon");
    let csv = stdout(&rscc(&["jump", "--scenario", "jump-annulus", "--state", "1", "--drive", "forced:x1", "--steps", "20", "--format", "csv"]));
    assert_eq!(csv_records(&csv).len(), 21);
}

#[test]
fn irreducibility_and_propagation() {
    let v = json(&rscc(&["irreducible", "--scenario", "gdms-demo", "--states", "v0,v1", "--kernel-depth", "3"]));
    assert_eq!(v["irreducible"], true);
    let v = json(&rscc(&["irreducible", "--scenario", "jump-annulus", "--states", "0,1", "--depth", "5"]));
    assert_eq!(v["irreducible"], false);
}

#[test]
fn fattening_outputs() {
    let csv = stdout(&rscc(&["fattening"]));
    assert_eq!(csv_records(&csv).len(), 61);
    let v = json(&rscc(&["fattening", "--format", "json", "--steps", "30"]));
    let p: f64 = (1..=30).map(|n| 1.0 - 0.5f64.powi(n)).product();
    assert!((v["all_x1_probability"].as_f64().unwrap() - p).abs() <= 1e-12);
}

#[test]
fn operator_modes_agree() {
    let base = ["operator", "--scenario", "jump-annulus", "--state", "2", "--y", "0.9,0.3", "--phi", "bump:0,2", "--steps", "3"];
    let value = |mode: &str| -> f64 {
        let mut args = base.to_vec();
        args.extend(["--mode", mode]);
        let rows = csv_records(&stdout(&rscc(&args)));
        let last = rows.last().unwrap();
        last.iter().rev().find_map(|t| t.parse().ok()).unwrap()
    };
    assert!((value("iterate") - value("oracle")).abs() <= 1e-12);
    let diag = stdout(&rscc(&["operator", "--scenario", "reinforcement", "--state", "0", "--y", "inf", "--phi", "clip:-0.01,0.01", "--mode", "diagnostic", "--steps", "6"]));
    assert!(csv_records(&diag).len() >= 4);
}

#[test]
fn scenario_files_load_like_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ja.ini");
    std::fs::write(&path, rscc::config::scenario_to_ini(&rscc_core::builtin::jump_annulus())).unwrap();
    let from_file = json(&rscc(&["kernel", "--scenario", path.to_str().unwrap(), "--state", "2"]));
    let builtin = json(&rscc(&["kernel", "--scenario", "jump-annulus", "--state", "2"]));
    assert_eq!(from_file["certificate"], builtin["certificate"]);
}

#[test]
fn report_subset_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rep");
    let o = rscc(&["report", "--only", "2,3", "--out", out.to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.contains("PASS")));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary.to_string().contains("preimage"));
    assert!(Path::new(&out).join("c3_kernel.json").exists());
    assert_eq!(rscc(&["report", "--only", "11"]).status.code(), Some(2));
}
