use std::path::Path;
use std::process::{Command, Output};

use polyelim::model::{canonicalize_system, parse_system};
use tempfile::TempDir;

fn polyelim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyelim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn gen(dir: &TempDir, senders: usize) -> String {
    let out = path(dir, &format!("hk{senders}.json"));
    let run = polyelim(&["gen-hk", "--senders", &senders.to_string(), "--out", &out]);
    assert!(run.status.success());
    out
}

fn rows_in(file: &Path) -> usize {
    parse_system(&std::fs::read(file).unwrap()).unwrap().rows().len()
}

#[test]
fn gen_hk_sizes_and_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(rows_in(Path::new(&gen(&dir, 2))), 8);
    assert_eq!(rows_in(Path::new(&gen(&dir, 3))), 24);
    let run = polyelim(&["gen-hk", "--senders", "0"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(!run.stderr.is_empty());
}

#[test]
fn eliminate_both_methods() {
    let dir = TempDir::new().unwrap();
    let hk2 = gen(&dir, 2);
    let report = path(&dir, "report.json");
    let run = polyelim(&["eliminate", "--in", &hk2, "--method", "hilbert", "--report", &report]);
    assert!(run.status.success());
    let hilbert = parse_system(&run.stdout).unwrap();
    assert_eq!(hilbert.rows().len(), 7);
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(report["basis_element_count"], 7);
    assert_eq!(report["constraint_count"], 8);

    let run = polyelim(&["eliminate", "--in", &hk2, "--method", "fme", "--remove-redundant", "--quiet"]);
    assert!(run.status.success());
    let fme = parse_system(&run.stdout).unwrap();
    assert_eq!(canonicalize_system(&fme), canonicalize_system(&hilbert));

    let run = polyelim(&[
        "eliminate", "--in", &hk2, "--method", "fme", "--order", "R2c,R1c", "--prune-each-round", "--quiet",
    ]);
    assert!(run.status.success());
    assert_eq!(canonicalize_system(&parse_system(&run.stdout).unwrap()), canonicalize_system(&hilbert));
}

#[test]
fn eliminate_errors() {
    let dir = TempDir::new().unwrap();
    let empty = path(&dir, "empty.json");
    std::fs::write(&empty, r#"{"variables":["x"],"eliminate":[],"symbols":[],"rows":[{"coeffs":{"x":"1"},"bound":{"const":"1"}}]}"#).unwrap();
    let run = polyelim(&["eliminate", "--in", &empty, "--method", "hilbert"]);
    assert_eq!(run.status.code(), Some(2));

    let run = polyelim(&["eliminate", "--in", &path(&dir, "missing.json"), "--method", "fme"]);
    assert_eq!(run.status.code(), Some(1));

    let garbage = path(&dir, "garbage.json");
    std::fs::write(&garbage, "{").unwrap();
    assert_eq!(polyelim(&["eliminate", "--in", &garbage, "--method", "fme"]).status.code(), Some(2));

    let hk2 = gen(&dir, 2);
    let run = polyelim(&["eliminate", "--in", &hk2, "--method", "hilbert", "--max-norm", "2"]);
    assert_eq!(run.status.code(), Some(3));
}

#[test]
fn compare_prints_table_rows() {
    let dir = TempDir::new().unwrap();
    let hk2 = gen(&dir, 2);
    let run = polyelim(&["compare", "--in", &hk2, "--quiet"]);
    assert_eq!(run.status.code(), Some(0));
    let text = String::from_utf8(run.stdout).unwrap();
    let lines: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0][..5], ["fme", "8", "2", "8", "7"]);
    assert_eq!(lines[1][..5], ["hilbert", "8", "2", "7", "7"]);
    for line in &lines {
        assert!(line[5].parse::<f64>().is_ok());
    }
}

#[test]
fn compare_hk3_reports_basis_size() {
    let dir = TempDir::new().unwrap();
    let hk3 = gen(&dir, 3);
    let run = polyelim(&["compare", "--in", &hk3, "--quiet"]);
    assert_eq!(run.status.code(), Some(0));
    let text = String::from_utf8(run.stdout).unwrap();
    let hilbert: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(hilbert[3], "153");
}

#[test]
fn compare_with_colliding_symbols() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "collide.json");
    // The second row's bound reuses the first row's symbol.
    std::fs::write(
        &file,
        r#"{"variables":["x","y"],"eliminate":["y"],"symbols":["a","b","c"],"rows":[
            {"coeffs":{"y":"1"},"bound":{"terms":{"a":"1"}}},
            {"coeffs":{"x":"1","y":"-1"},"bound":{"terms":{"a":"1"}}},
            {"coeffs":{"x":"2","y":"-1"},"bound":{"terms":{"c":"1"}}},
            {"coeffs":{"x":"1"},"bound":{"terms":{"b":"1"}}}]}"#,
    )
    .unwrap();
    let run = polyelim(&["compare", "--in", &file, "--quiet"]);
    assert_eq!(run.status.code(), Some(0));
}

#[test]
fn hilbert_raw_examples() {
    let dir = TempDir::new().unwrap();
    let m = path(&dir, "m.txt");
    std::fs::write(&m, "1\n-1\n").unwrap();
    let run = polyelim(&["hilbert-raw", "--in", &m]);
    assert_eq!(String::from_utf8(run.stdout).unwrap(), "1 1\n");

    std::fs::write(&m, "0\n").unwrap();
    let run = polyelim(&["hilbert-raw", "--in", &m, "--oracle", "2"]);
    assert!(run.status.success());
    assert_eq!(String::from_utf8(run.stdout).unwrap(), "1\n");

    let hk2 = polyelim::hilbert::dual_matrix(&polyelim::ratereg::hk_system(2).unwrap()).unwrap();
    std::fs::write(&m, hk2.to_string()).unwrap();
    let run = polyelim(&["hilbert-raw", "--in", &m, "--oracle", "3"]);
    assert!(run.status.success());
    assert_eq!(String::from_utf8(run.stdout).unwrap().lines().count(), 7);

    // Elements beyond the oracle bound are reported as a mismatch.
    std::fs::write(&m, "3\n-2\n").unwrap();
    assert_eq!(polyelim(&["hilbert-raw", "--in", &m, "--oracle", "2"]).status.code(), Some(5));

    std::fs::write(&m, "7\n-5\n").unwrap();
    assert_eq!(polyelim(&["hilbert-raw", "--in", &m, "--max-norm", "4"]).status.code(), Some(3));

    std::fs::write(&m, "1 2\n3\n").unwrap();
    assert_eq!(polyelim(&["hilbert-raw", "--in", &m]).status.code(), Some(2));
}

#[test]
fn validate_command() {
    let dir = TempDir::new().unwrap();
    let hk2 = gen(&dir, 2);
    let run = polyelim(&["validate", "--in", &hk2, "--trials", "300", "--seed", "5"]);
    assert!(run.status.success());
    let report: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["trials"], 300);
    assert!(report["disagreements"].as_array().unwrap().is_empty());

    let projected = path(&dir, "projected.json");
    let run = polyelim(&["eliminate", "--in", &hk2, "--method", "fme", "--out", &projected, "--quiet"]);
    assert!(run.status.success());
    let run = polyelim(&["validate", "--in", &hk2, "--projected", &projected, "--trials", "300"]);
    assert!(run.status.success());

    // A projection missing R1 <= I_1_00 accepts too much.
    let mut system = parse_system(&std::fs::read(&projected).unwrap()).unwrap();
    let rows: Vec<_> = system.rows().iter().filter(|r| system.display_row(r) != "R1 <= I_1_00").cloned().collect();
    assert_eq!(rows.len(), system.rows().len() - 1);
    system = system.with_rows(rows);
    std::fs::write(&projected, polyelim::model::serialize_system(&system)).unwrap();
    let run = polyelim(&["validate", "--in", &hk2, "--projected", &projected, "--trials", "1000"]);
    assert_eq!(run.status.code(), Some(4));
}

#[test]
fn commands_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let hk3 = gen(&dir, 3);
    let first = polyelim(&["eliminate", "--in", &hk3, "--method", "hilbert", "--quiet"]);
    let second = polyelim(&["eliminate", "--in", &hk3, "--method", "hilbert", "--quiet"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn help_lists_commands() {
    let run = polyelim(&["--help"]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    for command in ["gen-hk", "eliminate", "compare", "hilbert-raw", "validate"] {
        assert!(text.contains(command));
    }
}
