use std::process::{Command, Output};

fn nplet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nplet"))
        .args(args)
        .output()
        .expect("spawn nplet")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn test_reports_a_trivial_triple() {
    let o = nplet(&["test", "1", "2", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("anomalous        false"), "{s}");
    assert!(s.contains("(z-1) multiplicity 2"), "{s}");
}

#[test]
fn test_normalizes_a_scaled_tuple() {
    let o = nplet(&["test", "2", "4", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("gcd 2"), "{s}");
    assert!(s.contains("deciding (1,2,3)"), "{s}");
}

#[test]
fn unsorted_exponents_are_a_usage_error() {
    assert_eq!(nplet(&["test", "3", "2", "1"]).status.code(), Some(3));
    assert_eq!(nplet(&["test", "0", "1", "2"]).status.code(), Some(3));
    assert_eq!(nplet(&["frobnicate"]).status.code(), Some(3));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(nplet(&["--help"]).status.code(), Some(0));
}

#[test]
fn bounds_at_one_hundred() {
    let o = nplet(&["bounds", "--d", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("0.380986"), "{s}");
    assert!(s.contains("= 2068 "), "{s}");
}

#[test]
fn bounds_solve_brackets_the_threshold() {
    let o = nplet(&["--format", "records", "bounds", "--solve"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let d = v["d_star"].as_f64().unwrap();
    assert!(d > 1e12 && d < 1e13, "{d}");
}

#[test]
fn bounds_needs_an_argument() {
    assert_eq!(nplet(&["bounds"]).status.code(), Some(3));
}

#[test]
fn records_output_is_a_verifiable_store() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("single.jsonl");
    let o = nplet(&["--format", "records", "test", "1", "2", "3", "4"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&path, &o.stdout).unwrap();
    let v = nplet(&["verify", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn search_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n3.jsonl");
    let o = nplet(&["search", "--n", "3", "--max-d", "20", "--workers", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("anomalous found  0"));
    let v = nplet(&["verify", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));

    let text = std::fs::read_to_string(&out).unwrap();
    let tampered = text.replacen("\"residual\":\"1\"", "\"residual\":\"2\"", 1);
    std::fs::write(&out, tampered).unwrap();
    let v = nplet(&["verify", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(2));
    assert!(stdout(&v).contains("FAIL line 2"), "{}", stdout(&v));
}

#[test]
fn oracle_finds_nothing_for_a_coprime_quadruple() {
    let o = nplet(&["oracle", "1", "2", "3", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no candidates"));
}

#[test]
fn oracle_recovers_the_planted_root() {
    let o = nplet(&["--format", "records", "oracle", "2", "4", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().next().unwrap().to_string();
    let scan: serde_json::Value = serde_json::from_str(&line).unwrap();
    let c = scan["candidates"].as_array().unwrap();
    assert_eq!(c.len(), 1);
    let z = &c[0]["z"];
    assert!((z[0].as_f64().unwrap() + 1.0).abs() < 1e-9, "{z}");
}
