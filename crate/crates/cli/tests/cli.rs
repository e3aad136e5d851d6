use std::process::{Command, Output};

fn preper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_preper")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_documents_quantities() {
    let o = preper(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for needle in ["census", "preper", "verify-figures", "constants", "trend", "image-count", "squarefull", "ℛ(X)", "N(ψ(ℚ), X)"] {
        assert!(text.contains(needle), "missing {needle}");
    }
    let o = preper(&["census", "--help"]);
    assert!(stdout(&o).contains("--strict"));
    assert_eq!(preper(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(preper(&[]).status.code(), Some(1));
    assert_eq!(preper(&["bogus"]).status.code(), Some(1));
    assert_eq!(preper(&["census", "--family", "nonesuch", "--height", "5"]).status.code(), Some(1));
    assert_eq!(preper(&["preper", "quadratic", "1/0"]).status.code(), Some(1));
    assert_eq!(preper(&["preper", "crit2", "0"]).status.code(), Some(1));
    assert_eq!(preper(&["trend", "nonesuch"]).status.code(), Some(1));
}

#[test]
fn verify_figures_prints_marks() {
    let o = preper(&["verify-figures"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "53 ✓ 64 ✓ 65 ✓");
    let o = preper(&["verify-figures", "--c", "-3", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("9 + 35 + 9 = 53"), "{text}");
    assert!(text.contains("0 mismatches"), "{text}");
}

#[test]
fn preper_portrait_json() {
    let o = preper(&["preper", "quadratic", "-29/16"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 9);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 9);
    assert_eq!(v["types"][0], serde_json::json!([1, 0]));
    let o = preper(&["preper", "quadratic", "1/2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["method"], "tropical-filter");
    assert_eq!(v["count"], 1);
}

#[test]
fn census_summary_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let o = preper(&["census", "--family", "quadratic", "--height", "29", "--out", csv.to_str().unwrap(), "--strict"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["X"], 29);
    assert!(v["identity_checks"]["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("t_num,t_den,height,count"));
    assert!(rows.lines().any(|l| l.starts_with("-29,16,29,9,8,E0")));

    let json = dir.path().join("rows.json");
    let o = preper(&["census", "--family", "crit2", "--height", "5", "--out", json.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["summary"]["degenerate"], serde_json::json!(["0"]));

    let o = preper(&["census", "--family", "quadratic", "--height", "29", "--l", "1"]);
    assert!(stdout(&o).contains("-29/16"));
}

#[test]
fn counting_commands() {
    let o = preper(&["image-count", "--height", "100", "--c", "1"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("100,64,13,41,10"));
    let o = preper(&["image-count", "--height", "100", "--psi"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("100,65"));
    let o = preper(&["squarefull", "--height", "100"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exact"], 14);
    let o = preper(&["trend", "image-phi1", "--checkpoints", "100,400"]);
    assert!(stdout(&o).lines().any(|l| l == "100 64"));
    let o = preper(&["constants", "--digits", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().any(|c| c["decimal"] == "4.60767"), "{v}");
}

#[test]
fn trend_writes_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("psi");
    let o = preper(&["trend", "image-psi", "--checkpoints", "100", "--out", prefix.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let value = std::fs::read_to_string(dir.path().join("psi.value.dat")).unwrap();
    assert_eq!(value, "100 65\n");
    assert!(dir.path().join("psi.ratio.dat").exists());
}
