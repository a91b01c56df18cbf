//! End-to-end tests of the command-line interface: exit codes, report
//! contents, format handling, and override precedence.

use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pspankit"))
}

fn write_file(dir: &tempfile::TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

fn run_json(cmd: &mut Command) -> (Value, i32) {
    let out = cmd.output().unwrap();
    let code = out.status.code().unwrap();
    let report: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad report ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (report, code)
}

#[test]
fn pspan_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let spanning = write_file(&dir, "s.csv", "1,0\n0,1\n-1,-1\n");
    let not_spanning = write_file(&dir, "n.csv", "1,0\n0,1\n");
    let zero_row = write_file(&dir, "z.json", r#"{"vectors": [[1,0],[0,0]]}"#);

    let (report, code) = run_json(bin().arg("pspan").arg(&spanning));
    assert_eq!(code, 0);
    assert_eq!(report["result"]["is_positive_spanning"], Value::Bool(true));
    let gamma = report["result"]["gamma"].as_array().unwrap();
    assert_eq!(gamma.len(), 3);

    let (report, code) = run_json(bin().arg("pspan").arg(&not_spanning));
    assert_eq!(code, 10);
    assert_eq!(report["result"]["is_positive_spanning"], Value::Bool(false));
    assert!(report["result"]["residual"].as_f64().unwrap() > 0.1);

    let out = bin().arg("pspan").arg(&zero_row).output().unwrap();
    assert_eq!(out.status.code().unwrap(), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 1"), "stderr: {err}");
}

#[test]
fn csv_diagnostics_carry_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_file(&dir, "bad.csv", "1,0\n2,oops\n");
    let out = bin().arg("pspan").arg(&bad).output().unwrap();
    assert_eq!(out.status.code().unwrap(), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
    assert!(err.contains("column 2"), "stderr: {err}");
}

#[test]
fn cosine_golden_values_via_files() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = write_file(&dir, "d1.csv", "1,0,0\n-1,0,0\n0,1,0\n0,-1,0\n");
    let d2 = write_file(
        &dir,
        "d2.json",
        r#"{"vectors": [[1,0,0],[-1,0,0],[0,1,0]], "subspace": [[0.6,0.8,0]]}"#,
    );
    let subspace_l = write_file(&dir, "l.csv", "0.6,0.8,0\n");

    let (report, code) = run_json(bin().arg("cosine").arg(&d1).arg("--span"));
    assert_eq!(code, 0);
    let value = report["result"]["value"].as_f64().unwrap();
    assert!((value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert_eq!(report["result"]["case"], "POSITIVE");
    assert_eq!(
        report["result"]["cosine_vectors"].as_array().unwrap().len(),
        4
    );

    let (report, code) = run_json(bin().arg("cosine").arg(&d1).arg("--subspace").arg(&subspace_l));
    assert_eq!(code, 0);
    assert!((report["result"]["value"].as_f64().unwrap() - 0.8).abs() < 1e-12);

    // Subspace embedded in the input document.
    let (report, code) = run_json(bin().arg("cosine").arg(&d2).arg("--subspace"));
    assert_eq!(code, 0);
    assert!((report["result"]["value"].as_f64().unwrap() - 0.6).abs() < 1e-12);

    let (report, code) = run_json(bin().arg("cosine").arg(&d1).arg("--full-space"));
    assert_eq!(code, 0);
    assert!(report["result"]["value"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(report["result"]["case"], "ZERO");
}

#[test]
fn cosine_oracle_section_reports_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = write_file(&dir, "d1.csv", "1,0,0\n-1,0,0\n0,1,0\n0,-1,0\n");
    let (report, code) = run_json(
        bin()
            .arg("cosine")
            .arg(&d1)
            .arg("--span")
            .arg("--oracle")
            .arg("4096"),
    );
    assert_eq!(code, 0);
    let gap = report["oracle"]["gap"].as_f64().unwrap();
    assert!(gap >= -1e-9, "oracle gap {gap}");
    assert!(gap < 1e-6, "oracle gap {gap}");
}

#[test]
fn budget_exceeded_exits_11_and_names_the_count() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = write_file(&dir, "d1.csv", "1,0,0\n-1,0,0\n0,1,0\n0,-1,0\n");
    let out = bin()
        .arg("cosine")
        .arg(&d1)
        .arg("--span")
        .arg("--max-bases")
        .arg("2")
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 11);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('6'), "stderr should carry C(4,2)=6: {err}");
}

#[test]
fn environment_overrides_apply_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = write_file(&dir, "d1.csv", "1,0,0\n-1,0,0\n0,1,0\n0,-1,0\n");
    let out = bin()
        .arg("cosine")
        .arg(&d1)
        .arg("--span")
        .env("PSPANKIT_MAX_BASES", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 11);

    let out = bin()
        .arg("cosine")
        .arg(&d1)
        .arg("--span")
        .arg("--max-bases")
        .arg("100")
        .env("PSPANKIT_MAX_BASES", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 0);

    let out = bin()
        .arg("pspan")
        .arg(&d1)
        .env("PSPANKIT_FEAS_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 2);
}

#[test]
fn extend_both_modes_certify() {
    let dir = tempfile::tempdir().unwrap();
    let pair = write_file(&dir, "p.csv", "1,0\n0,1\n");

    let (report, code) = run_json(bin().arg("extend").arg(&pair).arg("--mode").arg("single"));
    assert_eq!(code, 0);
    let appended = report["result"]["appended"].as_array().unwrap();
    assert_eq!(appended.len(), 1);
    assert_eq!(appended[0][0].as_f64().unwrap(), -1.0);
    assert_eq!(appended[0][1].as_f64().unwrap(), -1.0);
    assert_eq!(
        report["result"]["certificate"]["is_positive_spanning"],
        Value::Bool(true)
    );

    let (report, code) = run_json(bin().arg("extend").arg(&pair).arg("--mode").arg("mirror"));
    assert_eq!(code, 0);
    assert_eq!(report["result"]["appended"].as_array().unwrap().len(), 2);
    assert_eq!(
        report["result"]["certificate"]["is_positive_spanning"],
        Value::Bool(true)
    );
}

#[test]
fn bound_command_paths() {
    let dir = tempfile::tempdir().unwrap();
    // Maximal basis of the plane: cm = 1/sqrt(2).
    let cross = write_file(&dir, "c.csv", "1,0\n-1,0\n0,1\n0,-1\n");
    let (report, code) = run_json(
        bin()
            .arg("bound")
            .arg(&cross)
            .arg("--order")
            .arg("1")
            .arg("--lip-grad")
            .arg("1")
            .arg("--delta")
            .arg("0.1"),
    );
    assert_eq!(code, 0);
    let bound = report["result"]["bound"].as_f64().unwrap();
    assert!((bound - 0.05 * std::f64::consts::SQRT_2).abs() < 1e-12);

    // Second order on the same symmetric set.
    let (report, code) = run_json(
        bin()
            .arg("bound")
            .arg(&cross)
            .arg("--order")
            .arg("2")
            .arg("--lip-hess")
            .arg("3")
            .arg("--delta")
            .arg("1"),
    );
    assert_eq!(code, 0);
    let bound = report["result"]["bound"].as_f64().unwrap();
    assert!((bound - std::f64::consts::SQRT_2).abs() < 1e-10);
    assert_eq!(report["result"]["alpha_max"].as_f64().unwrap(), 1.0);

    // Not positively spanning: advice instead of a bound, exit 12.
    let d2 = write_file(&dir, "d2.csv", "1,0,0\n-1,0,0\n0,1,0\n");
    let (report, code) = run_json(
        bin()
            .arg("bound")
            .arg(&d2)
            .arg("--order")
            .arg("1")
            .arg("--lip-grad")
            .arg("1"),
    );
    assert_eq!(code, 12);
    assert!(report["result"]["bound"].is_null());
    assert_eq!(
        report["result"]["advice"]["extended_spanning"],
        Value::Bool(true)
    );
    assert_eq!(
        report["result"]["advice"]["mirrored_spanning"],
        Value::Bool(true)
    );

    // Minimal positive basis has no antipodal partners: exit 13.
    let mpb = write_file(&dir, "m.csv", "1,0\n0,1\n-1,-1\n");
    let out = bin()
        .arg("bound")
        .arg(&mpb)
        .arg("--order")
        .arg("2")
        .arg("--lip-hess")
        .arg("1")
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 13);
}

#[test]
fn analyze_composite_report() {
    let dir = tempfile::tempdir().unwrap();
    let d2 = write_file(&dir, "d2.csv", "1,0,0\n-1,0,0\n0,1,0\n");
    let (report, code) = run_json(bin().arg("analyze").arg(&d2));
    assert_eq!(code, 0);
    let result = &report["result"];
    assert_eq!(result["span_dim"], 2);
    assert_eq!(result["radius"].as_f64().unwrap(), 1.0);
    assert_eq!(result["spanning"]["is_positive_spanning"], Value::Bool(false));
    assert_eq!(result["positively_independent"], Value::Bool(true));
    assert!(result["cosine"]["value"].as_f64().unwrap().abs() < 1e-12);
    let subset: Vec<u64> = result["spanning_subset"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(subset, vec![0, 1]);
    assert_eq!(result["self_checks"]["active_sets_span"], Value::Bool(true));
    assert_eq!(result["self_checks"]["sign_agreement"], Value::Bool(true));

    let singleton = write_file(&dir, "s.csv", "3,4\n");
    let (report, code) = run_json(bin().arg("analyze").arg(&singleton));
    assert_eq!(code, 0);
    let result = &report["result"];
    assert!((result["cosine"]["value"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(result["positively_independent"], Value::Bool(true));
    assert_eq!(result["radius"].as_f64().unwrap(), 5.0);

    let d1 = write_file(&dir, "d1.csv", "1,0,0\n-1,0,0\n0,1,0\n0,-1,0\n");
    let (report, code) = run_json(bin().arg("analyze").arg(&d1));
    assert_eq!(code, 0);
    let result = &report["result"];
    let value = result["cosine"]["value"].as_f64().unwrap();
    assert!((value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert_eq!(result["positively_independent"], Value::Bool(true));
    assert_eq!(result["spanning"]["is_positive_spanning"], Value::Bool(true));
}

#[test]
fn oracle_command_sections() {
    let dir = tempfile::tempdir().unwrap();
    let d2 = write_file(&dir, "d2.csv", "1,0,0\n-1,0,0\n0,1,0\n");
    let (report, code) = run_json(
        bin()
            .arg("oracle")
            .arg(&d2)
            .arg("--span")
            .arg("--samples")
            .arg("2000")
            .arg("--refine")
            .arg("32")
            .arg("--kkt")
            .arg("--subsets"),
    );
    assert_eq!(code, 0);
    let result = &report["result"];
    assert!(result["sampled_value"].as_f64().unwrap() >= -1e-12);
    assert!(result["kkt_min_norm"]["norm"].as_f64().unwrap() < 1e-10);
    let subsets = result["spanning_subsets"].as_array().unwrap();
    assert!(subsets
        .iter()
        .any(|s| s.as_array().unwrap().len() == 2));

    // Oversized oracle requests are input errors.
    let big: String = (0..21)
        .map(|i| format!("{},1\n", i + 1))
        .collect();
    let big = write_file(&dir, "big.csv", &big);
    let out = bin().arg("oracle").arg(&big).arg("--kkt").output().unwrap();
    assert_eq!(out.status.code().unwrap(), 2);
}

#[test]
fn stdin_input_with_explicit_format() {
    let mut child = bin()
        .arg("pspan")
        .arg("-")
        .arg("--format")
        .arg("csv")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"1,0\n0,1\n-1,-1\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code().unwrap(), 0);
}

#[test]
fn reports_round_trip_and_preserve_input_digits() {
    let dir = tempfile::tempdir().unwrap();
    // A value that needs all 17 significant digits (in shortest
    // round-trip form, so the echo reproduces the exact digit string).
    let needle = "0.12345678901234566";
    let input = format!(r#"{{"vectors": [[{needle},1],[1,0]]}}"#);
    let path = write_file(&dir, "rt.json", &input);
    let out = bin().arg("pspan").arg(&path).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    // The parsed f64 serializes back to the identical shortest decimal.
    assert!(
        text.contains(needle),
        "echoed vectors lost precision: {text}"
    );
    // parse(serialize(report)) is the identity on values.
    let v1: Value = serde_json::from_str(&text).unwrap();
    let v2: Value = serde_json::from_str(&serde_json::to_string(&v1).unwrap()).unwrap();
    assert_eq!(v1, v2);
}

#[test]
fn all_vectors_flag_lifts_the_cap() {
    let dir = tempfile::tempdir().unwrap();
    // {±e_i} in R^5 has 2^5 = 32 cosine vectors.
    let mut rows = String::new();
    for i in 0..5 {
        for sign in [1.0, -1.0] {
            let mut row = [0.0; 5];
            row[i] = sign;
            rows.push_str(
                &row.iter()
                    .map(|x: &f64| x.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            rows.push('\n');
        }
    }
    let path = write_file(&dir, "cross5.csv", &rows);
    let (report, _) = run_json(bin().arg("cosine").arg(&path).arg("--span"));
    assert_eq!(report["result"]["vectors_truncated"], Value::Bool(true));
    assert_eq!(
        report["result"]["cosine_vectors"].as_array().unwrap().len(),
        16
    );
    let (report, _) = run_json(
        bin()
            .arg("cosine")
            .arg(&path)
            .arg("--span")
            .arg("--all-vectors"),
    );
    assert_eq!(report["result"]["vectors_truncated"], Value::Bool(false));
    assert_eq!(
        report["result"]["cosine_vectors"].as_array().unwrap().len(),
        32
    );
}
