//! End-to-end checks of the installed binary: exit codes, report layout, and
//! byte-for-byte reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn qcentipede(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcentipede"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("theta1") && !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn table1_writes_18_rows_with_provenance_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.csv");
    let out = qcentipede(&["table1", "--shots", "1000", "--seed", "42", "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# qcentipede "));
    assert!(text.contains("# schedule_sha256: "));
    assert!(text.contains("# shots: 1000"));
    assert!(text.contains("# seed: 42"));
    assert!(text.contains("theta1,theta2,theta3,exact_p1,exact_p2,mc_p1,mc_p2,shots,seed"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 18);
    assert_eq!(rows[0][..3], ["0", "0", "0"]);
    // the boxed corners pay (2, 2) exactly
    assert_eq!(rows[0][3], "2.00000000000");
    assert_eq!(rows[13][4], "2.00000000000");
}

#[test]
fn table1_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = qcentipede(&["table1", "--seed", "7", "-o", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn table1_single_shot_lands_on_schedule_payoffs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    let out = qcentipede(&["table1", "--shots", "1", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    let schedule_pairs = [(1.0, 0.0), (0.0, 2.0), (3.0, 1.0), (2.0, 2.0)];
    for row in data_rows(&std::fs::read_to_string(&path).unwrap()) {
        let mc: (f64, f64) = (row[5].parse().unwrap(), row[6].parse().unwrap());
        assert!(
            schedule_pairs.contains(&mc),
            "single-shot payoff {mc:?} is not a schedule pair"
        );
    }
}

#[test]
fn table1_unwritable_path_exits_2() {
    let out = qcentipede(&["table1", "-o", "/nonexistent-dir/t1.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn table1_rejects_zero_shots() {
    let out = qcentipede(&["table1", "--shots", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_reports_corner_state() {
    let out = qcentipede(&["simulate", "--angles", "pi,pi,pi"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("final state: i|000⟩"), "{text}");
    assert!(text.contains("exact payoffs: player1=2.00000000000 player2=2.00000000000"));

    let out = qcentipede(&["simulate", "--angles", "0,0,0"]);
    let text = stdout_of(&out);
    assert!(text.contains("final state: |000⟩"));
}

#[test]
fn simulate_reports_outcome_split() {
    let out = qcentipede(&["simulate", "--angles", "pi/2,0,0"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("FullCooperation"));
    assert!(text.contains("0.500000000000"), "{text}");
    assert!(text.contains("DefectAt(2)"));
}

#[test]
fn simulate_json_report_shape() {
    let out = qcentipede(&["simulate", "--angles", "pi/2,0,0", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["meta"]["tool"], "qcentipede");
    let defect2 = value["report"]["outcome_probabilities"]["DefectAt(2)"].as_f64().unwrap();
    assert!((defect2 - 0.5).abs() < 1e-12);
    let p1 = value["report"]["exact_payoffs"]["player1"].as_f64().unwrap();
    assert!((p1 - 1.0).abs() < 1e-12);
    assert_eq!(value["report"]["state"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_rejects_bad_angles() {
    // count mismatch against the built-in 3-round schedule
    let out = qcentipede(&["simulate", "--angles", "pi,pi"]);
    assert_eq!(out.status.code(), Some(2));
    // unparsable token
    let out = qcentipede(&["simulate", "--angles", "pi,bogus,0"]);
    assert_eq!(out.status.code(), Some(2));
    // outside the strategy cube
    let out = qcentipede(&["simulate", "--angles", "2pi,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    // csv is not a simulate format
    let out = qcentipede(&["simulate", "--angles", "0,0,0", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_honors_custom_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let schedule = dir.path().join("two.json");
    std::fs::write(
        &schedule,
        r#"{"rounds": 2, "defect": [[1,0],[0,2]], "cooperate": [2,2]}"#,
    )
    .unwrap();

    let out = qcentipede(&[
        "simulate",
        "--angles",
        "pi/2,pi/2",
        "--schedule",
        schedule.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout_of(&out).contains("DefectAt(2)"));

    // three angles against a 2-round schedule
    let out = qcentipede(&[
        "simulate",
        "--angles",
        "pi/2,pi/2,0",
        "--schedule",
        schedule.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // malformed schedule file
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"rounds": 3}"#).unwrap();
    let out = qcentipede(&["simulate", "--angles", "0,0,0", "--schedule", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nash_certifies_corners_and_rejects_interior_point() {
    let out = qcentipede(&["nash", "--angles", "0,0,0", "--grid", "25"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["report"]["is_nash"], true);

    let out = qcentipede(&["nash", "--angles", "pi,pi,pi", "--grid", "25"]);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["report"]["is_nash"], true);

    let out = qcentipede(&["nash", "--angles", "0,pi/2,0", "--grid", "25"]);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["report"]["is_nash"], false);
    let gain = value["report"]["best_deviation_gain"][1].as_f64().unwrap();
    assert!((gain - 1.0).abs() < 1e-9);
}

#[test]
fn nash_rejects_tiny_grid() {
    let out = qcentipede(&["nash", "--angles", "0,0,0", "--grid", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn grad_check_reports_tight_agreement() {
    let out = qcentipede(&["grad-check", "--samples", "100"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["report"]["within_tolerance"], true);
    let max = value["report"]["summary"]["max_abs_difference"].as_f64().unwrap();
    assert!(max < 1e-6);
}

#[test]
fn conjecture_reports_parity_split() {
    let out = qcentipede(&["conjecture", "--n", "2:6", "--samples", "300"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let reports = value["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 5);
    let collapse: Vec<bool> = reports
        .iter()
        .map(|r| r["collapse_holds"].as_bool().unwrap())
        .collect();
    assert_eq!(collapse, vec![false, true, false, true, false]);
    for report in reports {
        if !report["collapse_holds"].as_bool().unwrap() {
            assert!(report["witness"].is_array());
            assert!(report["max_last_round_defect_prob"].as_f64().unwrap() >= 0.2);
        } else {
            assert!(report["witness"].is_null());
        }
    }
}

#[test]
fn conjecture_rejects_bad_ranges() {
    for range in ["9:2", "1:3", "2:9", "abc", "3:2"] {
        let out = qcentipede(&["conjecture", "--n", range]);
        assert_eq!(out.status.code(), Some(2), "range {range} accepted");
    }
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = qcentipede(&[
            "conjecture",
            "--n",
            "2:3",
            "--samples",
            "100",
            "--seed",
            "5",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    // diagnostics stay out of report files
    assert!(!std::fs::read_to_string(&a).unwrap().contains("corner states"));
}

#[test]
fn help_lists_all_commands() {
    let out = qcentipede(&["--help"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for cmd in ["table1", "simulate", "nash", "grad-check", "conjecture"] {
        assert!(text.contains(cmd), "missing {cmd}");
    }
}

#[test]
fn missing_output_directory_is_not_created() {
    let dir = tempfile::tempdir().unwrap();
    let nested = dir.path().join("missing").join("report.json");
    let out = qcentipede(&["nash", "--angles", "0,0,0", "-o", nested.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!Path::new(&nested).exists());
}
