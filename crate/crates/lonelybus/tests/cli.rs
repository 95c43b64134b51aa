//! End-to-end tests of the `lonelybus` binary: documents, formats, exit
//! statuses, and the enumeration-cap plumbing.

use std::process::{Command, Output};

use serde_json::Value;

fn lonelybus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lonelybus"))
        .args(args)
        .env_remove("LONELYBUS_MAX_ENUM")
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

#[test]
fn tail_document_carries_exact_rational() {
    let out = lonelybus(&["tail", "--n", "3", "--k", "2", "--r", "1"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["command"], "tail");
    assert_eq!(doc["parameters"]["n"], 3);
    assert_eq!(doc["results"]["tail_probability"]["rational"], "3/4");
    assert_eq!(doc["results"]["tail_probability"]["decimal"], 0.75);
    for key in ["command", "version", "parameters", "results", "verdicts", "elapsed_ms"] {
        assert!(doc.get(key).is_some(), "missing envelope key {key}");
    }
}

#[test]
fn expected_document_reports_closed_form() {
    let out = lonelybus(&["expected", "--n", "2", "--k", "3"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["results"]["expected_lonely"]["rational"], "4/3");
}

#[test]
fn pmf_json_and_csv_encode_identical_content() {
    let json_out = lonelybus(&["pmf", "--n", "3", "--k", "3"]);
    assert!(json_out.status.success());
    let doc = stdout_json(&json_out);
    let entries = doc["results"]["pmf"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    assert_eq!(entries[0]["probability"]["rational"], "1/9");
    assert_eq!(entries[1]["probability"]["rational"], "2/3");
    assert_eq!(entries[2]["probability"]["rational"], "0/1");
    assert_eq!(entries[3]["probability"]["rational"], "2/9");

    let csv_out = lonelybus(&["pmf", "--n", "3", "--k", "3", "--format", "csv"]);
    assert!(csv_out.status.success());
    let csv = String::from_utf8(csv_out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,probability,decimal"));
    for (line, entry) in lines.zip(entries) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], entry["s"].to_string());
        assert_eq!(fields[1], entry["probability"]["rational"].as_str().unwrap());
        assert_eq!(
            fields[2].parse::<f64>().unwrap(),
            entry["probability"]["decimal"].as_f64().unwrap()
        );
    }
}

#[test]
fn dominance_document_matches_known_rows() {
    let out = lonelybus(&["dominance", "--n", "3", "--k-max", "2"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    let rows = doc["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let row = |k: u64, r: u64| {
        rows.iter()
            .find(|row| row["k"] == k && row["r"] == r)
            .unwrap()
    };
    assert_eq!(row(1, 1)["tail_k"]["rational"], "0/1");
    assert_eq!(row(1, 1)["tail_k_plus_1"]["rational"], "3/4");
    assert_eq!(row(2, 1)["tail_k"]["rational"], "3/4");
    assert_eq!(row(2, 1)["tail_k_plus_1"]["rational"], "8/9");
    assert_eq!(row(2, 1)["strict"], true);
    assert_eq!(doc["verdicts"]["all_pass"], true);

    let csv_out = lonelybus(&["dominance", "--n", "3", "--k-max", "2", "--format", "csv"]);
    let csv = String::from_utf8(csv_out.stdout).unwrap();
    assert!(csv.starts_with("n,k,r,tail_k,"));
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.contains("3,2,1,3/4,0.75,8/9,"));
}

#[test]
fn verify_theorem1_passes_with_exit_zero() {
    let out = lonelybus(&["verify", "--theorem", "1", "--n", "2", "--k", "1"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["verdicts"]["all_pass"], true);
    assert_eq!(doc["verdicts"]["failed_claims"].as_array().unwrap().len(), 0);
    let reports = doc["results"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["total_configurations"], 4);
    let claims = reports[0]["claims"].as_array().unwrap();
    assert!(!claims.is_empty());
    assert!(claims.iter().all(|c| c["holds"] == true));
    let headline = claims
        .iter()
        .find(|c| c["name"] == "loss_side_gt_gain_side")
        .expect("headline claim present");
    assert_eq!(headline["lhs"]["rational"], "1/2");
    assert_eq!(headline["relation"], ">");
    assert_eq!(headline["rhs"]["rational"], "0/1");
}

#[test]
fn verify_theorem2_without_r_covers_all_thresholds() {
    let out = lonelybus(&["verify", "--theorem", "2", "--n", "3", "--k", "2"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    let reports = doc["results"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["r"], 2);
    assert_eq!(reports[1]["r"], 3);
    assert_eq!(doc["verdicts"]["all_pass"], true);
}

#[test]
fn verify_rejects_r_with_theorem_one() {
    let out = lonelybus(&["verify", "--theorem", "1", "--n", "3", "--k", "2", "--r", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("--theorem 2"), "stderr: {stderr}");
}

#[test]
fn usage_errors_exit_one_with_one_line_diagnostic() {
    let out = lonelybus(&["tail", "--n", "3", "--k", "2", "--r", "1", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.trim_end().lines().count(), 1, "stderr: {stderr}");
    assert!(stderr.contains("--bogus"));

    let out = lonelybus(&["tail", "--n", "1", "--k", "2", "--r", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("passengers"), "stderr: {stderr}");
}

#[test]
fn enumeration_cap_errors_name_the_required_count() {
    let out = lonelybus(&[
        "verify", "--theorem", "1", "--n", "3", "--k", "2", "--max-enum", "100",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("216"), "stderr: {stderr}");
    assert!(stderr.contains("100"), "stderr: {stderr}");
}

#[test]
fn env_var_sets_the_cap_and_the_flag_wins() {
    let out = Command::new(env!("CARGO_BIN_EXE_lonelybus"))
        .args(["verify", "--theorem", "1", "--n", "3", "--k", "2"])
        .env("LONELYBUS_MAX_ENUM", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("216"));

    let out = Command::new(env!("CARGO_BIN_EXE_lonelybus"))
        .args([
            "verify", "--theorem", "1", "--n", "3", "--k", "2", "--max-enum", "1000",
        ])
        .env("LONELYBUS_MAX_ENUM", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "flag must override the environment");
}

#[test]
fn simulate_is_deterministic_for_fixed_inputs() {
    let args = [
        "simulate", "--n", "10", "--k", "5", "--r", "1", "--trials", "20000", "--seed", "99",
        "--workers", "2",
    ];
    let first = stdout_json(&lonelybus(&args));
    let second = stdout_json(&lonelybus(&args));
    assert_eq!(first["results"], second["results"]);
    let point = first["results"]["point"].as_f64().unwrap();
    let lo = first["results"]["ci_low"].as_f64().unwrap();
    let hi = first["results"]["ci_high"].as_f64().unwrap();
    assert!(lo <= point && point <= hi);
    assert_eq!(
        first["results"]["rational"].as_str().unwrap(),
        format!("{}/20000", first["results"]["hits"])
    );
}

#[test]
fn failed_verification_claims_exit_two_with_the_full_report() {
    // The per-cell association bound is refuted at (4, 3, r=2), cell
    // (m=3, l=1); the verifier must report it and signal through the exit
    // status rather than erroring out.
    let out = lonelybus(&["verify", "--theorem", "2", "--n", "4", "--k", "3", "--r", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["verdicts"]["all_pass"], false);
    let failed: Vec<&str> = doc["verdicts"]["failed_claims"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(
        failed.contains(&"[r=2] loss_cell_ge_coeff_times_witness[m=3,l=1]"),
        "failed claims: {failed:?}"
    );
    let report = &doc["results"]["reports"][0];
    let image_claim = report["claims"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "association_images_in_loss_cell[m=3,l=1]")
        .unwrap();
    assert_eq!(image_claim["holds"], false);
    assert!(
        image_claim["counterexample"]["assignment"].is_array(),
        "a failing pointwise claim must carry its first counterexample"
    );
    // The headline inequality still holds: dominance itself is not in doubt.
    let headline = report["claims"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "loss_side_ge_gain_side")
        .unwrap();
    assert_eq!(headline["holds"], true);
}

#[test]
fn quiet_suppresses_stdout_but_keeps_the_status() {
    let out = lonelybus(&["tail", "--n", "3", "--k", "2", "--r", "1", "--quiet"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}
