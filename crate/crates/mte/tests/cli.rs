//! End-to-end tests of the command-line interface: subcommand output
//! shapes, exact values, exit codes, and input validation.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["mte".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    mte::cli::run(argv)
}

fn run_json(args: &[&str], out: &Path) -> Value {
    let mut full = args.to_vec();
    let out_str = out.display().to_string();
    full.push("--output");
    full.push(&out_str);
    assert_eq!(run(&full), 0, "command failed: {args:?}");
    serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap()
}

const MU_MARGINALS: &str = r#"{"k": 2, "a": ["1/3", "2/3"], "b": ["2/3", "1/3"]}"#;
const MU2_JOINT: &str = r#"{"k": 2, "m": [["0", "1/3"], ["2/3", "0"]]}"#;

#[test]
fn width_reports_running_example() {
    let ws = Workspace::new();
    let marginals = ws.file("m.json", MU_MARGINALS);
    let doc = run_json(
        &["width", "--marginals", marginals.to_str().unwrap()],
        &ws.out("width.json"),
    );
    assert_eq!(doc["min_width"], "1/6");
    assert_eq!(doc["argmin_r"], 0);
    let widths: Vec<&str> = doc["widths"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["width"].as_str().unwrap())
        .collect();
    assert_eq!(widths, vec!["1/2", "1/6", "1/6"]);
}

#[test]
fn width_csv_has_one_row_per_candidate() {
    let ws = Workspace::new();
    let marginals = ws.file("m.json", MU_MARGINALS);
    let out = ws.out("width.csv");
    assert_eq!(
        run(&[
            "width",
            "--marginals",
            marginals.to_str().unwrap(),
            "--format",
            "csv",
            "--output",
            out.to_str().unwrap(),
        ]),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,nu_lower,nu_upper,width");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "-1,0,0,1/2");
    assert_eq!(lines[2], "0,1/3,1/3,1/6");
    assert_eq!(lines[3], "1,2/3,1,1/6");
}

#[test]
fn variability_reports_exact_pair() {
    let ws = Workspace::new();
    let marginals = ws.file("m.json", MU_MARGINALS);
    let doc = run_json(
        &[
            "variability",
            "--marginals",
            marginals.to_str().unwrap(),
            "--r",
            "0",
        ],
        &ws.out("v.json"),
    );
    assert_eq!(doc["nu_lower"], "1/3");
    assert_eq!(doc["nu_upper"], "1/3");
    assert_eq!(doc["r"], 0);
}

#[test]
fn variability_out_of_range_exits_1() {
    let ws = Workspace::new();
    let marginals = ws.file("m.json", MU_MARGINALS);
    assert_eq!(
        run(&[
            "variability",
            "--marginals",
            marginals.to_str().unwrap(),
            "--r",
            "5"
        ]),
        1
    );
}

#[test]
fn extremal_reports_psi() {
    let ws = Workspace::new();
    let doc = run_json(&["extremal", "--k", "3"], &ws.out("e.json"));
    assert_eq!(doc["psi"], "3/10");
    assert_eq!(doc["a"].as_array().unwrap().len(), 3);
    assert_eq!(doc["a"][0], "1/5");
    assert_eq!(doc["b"][2], "1/5");
}

#[test]
fn extremal_output_is_readable_as_marginals() {
    let ws = Workspace::new();
    let out = ws.out("extremal.json");
    run_json(&["extremal", "--k", "2"], &out);
    let doc = run_json(
        &["width", "--marginals", out.to_str().unwrap()],
        &ws.out("w.json"),
    );
    assert_eq!(doc["min_width"], "1/6");
}

#[test]
fn estimate_from_csv() {
    let ws = Workspace::new();
    let mut csv = String::from("unit,group,outcome\n");
    for (unit, group, outcome) in [
        (1, "a", 0),
        (2, "a", 1),
        (3, "a", 1),
        (4, "b", 0),
        (5, "b", 0),
        (6, "b", 1),
    ] {
        csv.push_str(&format!("{unit},{group},{outcome}\n"));
    }
    let responses = ws.file("r.csv", &csv);
    let doc = run_json(
        &[
            "estimate",
            "--responses",
            responses.to_str().unwrap(),
            "--k",
            "2",
            "--beta",
            "1/100",
        ],
        &ws.out("est.json"),
    );
    assert_eq!(doc["m_hat"], 0);
    assert_eq!(doc["epsilon"], "31/150");
    assert_eq!(doc["beta"], "1/100");
    assert_eq!(doc["n_a"], 3);
    assert_eq!(doc["n_b"], 3);
    assert_eq!(doc["widths"].as_array().unwrap().len(), 3);
}

#[test]
fn estimate_rejects_duplicate_units() {
    let ws = Workspace::new();
    let responses = ws.file("r.csv", "unit,group,outcome\n1,a,0\n1,b,1\n");
    assert_eq!(
        run(&[
            "estimate",
            "--responses",
            responses.to_str().unwrap(),
            "--k",
            "2"
        ]),
        1
    );
}

#[test]
fn oracle_matches_greedy_in_check_mode() {
    let ws = Workspace::new();
    let marginals = ws.file("m.json", MU_MARGINALS);
    for r in ["-1", "0", "1"] {
        let doc = run_json(
            &[
                "oracle",
                "--marginals",
                marginals.to_str().unwrap(),
                "--r",
                r,
                "--check",
            ],
            &ws.out("o.json"),
        );
        assert_eq!(doc["match"], true);
        assert_eq!(doc["greedy"]["nu_lower"], doc["oracle"]["nu_lower"]);
        assert_eq!(doc["greedy"]["nu_upper"], doc["oracle"]["nu_upper"]);
    }
}

#[test]
fn oracle_without_check_prints_pair() {
    let ws = Workspace::new();
    let marginals = ws.file("m.json", MU_MARGINALS);
    let doc = run_json(
        &[
            "oracle",
            "--marginals",
            marginals.to_str().unwrap(),
            "--r",
            "1",
        ],
        &ws.out("o.json"),
    );
    assert_eq!(doc["nu_lower"], "2/3");
    assert_eq!(doc["nu_upper"], "1");
}

#[test]
fn simulate_coverage_report_shape() {
    let ws = Workspace::new();
    let joint = ws.file("j.json", MU2_JOINT);
    let doc = run_json(
        &[
            "simulate",
            "coverage",
            "--joint",
            joint.to_str().unwrap(),
            "--n",
            "300",
            "--trials",
            "10",
            "--seed",
            "9",
        ],
        &ws.out("cov.json"),
    );
    assert_eq!(doc["trials"], 10);
    assert_eq!(doc["config"]["seed"], 9);
    assert_eq!(doc["config"]["beta"], "1/20");
    assert_eq!(doc["epsilon_star"], "1/6");
    assert_eq!(doc["records"].as_array().unwrap().len(), 10);
    let rec = &doc["records"][0];
    assert_eq!(rec["trial"], 0);
    assert_eq!(rec["sample_stream"], 0);
    assert_eq!(rec["assign_stream"], 1);
    assert!(rec["covered"].is_boolean());
}

#[test]
fn simulate_coverage_csv_rows() {
    let ws = Workspace::new();
    let joint = ws.file("j.json", MU2_JOINT);
    let out = ws.out("cov.csv");
    assert_eq!(
        run(&[
            "simulate",
            "coverage",
            "--joint",
            joint.to_str().unwrap(),
            "--n",
            "100",
            "--trials",
            "5",
            "--seed",
            "1",
            "--format",
            "csv",
            "--output",
            out.to_str().unwrap(),
        ]),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "trial,sample_stream,assign_stream,m_hat,epsilon,epsilon_float,covered"
    );
    assert_eq!(lines.len(), 6);
}

#[test]
fn simulate_indist_pairs_reports() {
    let ws = Workspace::new();
    let j1 = ws.file(
        "j1.json",
        r#"{"k": 2, "m": [["1/3", "0"], ["1/3", "1/3"]]}"#,
    );
    let j2 = ws.file("j2.json", MU2_JOINT);
    let doc = run_json(
        &[
            "simulate",
            "indist",
            "--joint1",
            j1.to_str().unwrap(),
            "--joint2",
            j2.to_str().unwrap(),
            "--n",
            "300",
            "--trials",
            "12",
            "--seed",
            "5",
        ],
        &ws.out("ind.json"),
    );
    assert_eq!(doc["tv_bin_width"], "1/20");
    assert!(doc["tv_distance"].as_f64().unwrap() <= 1.0);
    assert_eq!(doc["first"]["trials"], 12);
    assert_eq!(doc["second"]["trials"], 12);

    let csv_out = ws.out("ind.csv");
    assert_eq!(
        run(&[
            "simulate",
            "indist",
            "--joint1",
            j1.to_str().unwrap(),
            "--joint2",
            j2.to_str().unwrap(),
            "--n",
            "300",
            "--trials",
            "12",
            "--seed",
            "5",
            "--format",
            "csv",
            "--output",
            csv_out.to_str().unwrap(),
        ]),
        0
    );
    let text = fs::read_to_string(&csv_out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "arm,trial,sample_stream,assign_stream,m_hat,epsilon,epsilon_float,covered"
    );
    // one row per trial per arm
    assert_eq!(lines.len(), 25);
}

#[test]
fn simulate_indist_rejects_different_marginals() {
    let ws = Workspace::new();
    let j1 = ws.file("j1.json", MU2_JOINT);
    let j2 = ws.file("j2.json", r#"{"k": 2, "m": [["1/2", "0"], ["0", "1/2"]]}"#);
    assert_eq!(
        run(&[
            "simulate",
            "indist",
            "--joint1",
            j1.to_str().unwrap(),
            "--joint2",
            j2.to_str().unwrap(),
            "--n",
            "100",
            "--trials",
            "4",
        ]),
        1
    );
}

#[test]
fn floats_rejected_unless_allowed() {
    let ws = Workspace::new();
    let marginals = ws.file("m.json", r#"{"k": 2, "a": [0.25, 0.75], "b": ["1", "0"]}"#);
    assert_eq!(
        run(&["width", "--marginals", marginals.to_str().unwrap()]),
        1
    );
    let doc = run_json(
        &[
            "width",
            "--marginals",
            marginals.to_str().unwrap(),
            "--allow-float",
        ],
        &ws.out("w.json"),
    );
    assert_eq!(doc["k"], 2);
}

#[test]
fn missing_file_and_bad_schema_exit_1() {
    let ws = Workspace::new();
    assert_eq!(run(&["width", "--marginals", "/nonexistent/m.json"]), 1);
    let bad = ws.file(
        "bad.json",
        r#"{"k": 2, "a": ["1/2", "1/3"], "b": ["1", "0"]}"#,
    );
    assert_eq!(run(&["width", "--marginals", bad.to_str().unwrap()]), 1);
    let invalid = ws.file("invalid.json", "not json");
    assert_eq!(run(&["width", "--marginals", invalid.to_str().unwrap()]), 1);
}

#[test]
fn csv_format_rejected_for_scalar_reports() {
    let ws = Workspace::new();
    let marginals = ws.file("m.json", MU_MARGINALS);
    assert_eq!(
        run(&[
            "variability",
            "--marginals",
            marginals.to_str().unwrap(),
            "--r",
            "0",
            "--format",
            "csv",
        ]),
        1
    );
}

#[test]
fn emitted_json_has_sorted_keys() {
    let ws = Workspace::new();
    let marginals = ws.file("m.json", MU_MARGINALS);
    let out = ws.out("w.json");
    run_json(&["width", "--marginals", marginals.to_str().unwrap()], &out);
    let text = fs::read_to_string(&out).unwrap();
    for window in [
        ("\"argmin_r\"", "\"k\""),
        ("\"k\"", "\"min_width\""),
        ("\"min_width\"", "\"min_width_float\""),
        ("\"min_width_float\"", "\"widths\""),
    ] {
        let first = text.find(window.0).unwrap();
        let second = text.find(window.1).unwrap();
        assert!(first < second, "keys out of order: {window:?}");
    }
}

#[test]
fn help_exits_0_and_unknown_flag_exits_1() {
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["width", "--bogus"]), 1);
    assert_eq!(run(&[]), 1);
}

#[test]
fn beta_validation() {
    let ws = Workspace::new();
    let mut csv = String::from("unit,group,outcome\n1,a,0\n2,b,1\n");
    csv.push_str("3,a,1\n4,b,0\n");
    let responses = ws.file("r.csv", &csv);
    assert_eq!(
        run(&[
            "estimate",
            "--responses",
            responses.to_str().unwrap(),
            "--k",
            "2",
            "--beta",
            "0",
        ]),
        1
    );
    assert_eq!(
        run(&[
            "estimate",
            "--responses",
            responses.to_str().unwrap(),
            "--k",
            "2",
            "--beta",
            "0.05",
        ]),
        1,
        "float beta must be rejected without --allow-float"
    );
    let doc = run_json(
        &[
            "estimate",
            "--responses",
            responses.to_str().unwrap(),
            "--k",
            "2",
            "--beta",
            "0.05",
            "--allow-float",
        ],
        &ws.out("est.json"),
    );
    assert_eq!(doc["beta"], "1/20");
}
