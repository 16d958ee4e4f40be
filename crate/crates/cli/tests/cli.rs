use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn hlk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlk")).args(args).current_dir(fixtures()).env_remove("HLK_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(hlk(&["--help"]).status.code(), Some(0));
    assert_eq!(hlk(&["--version"]).status.code(), Some(0));
    assert_eq!(hlk(&[]).status.code(), Some(3));
}

#[test]
fn json_report_lists_every_verdict() {
    let o = hlk(&["check", "broken-twist.json", "--suite", "axioms", "--report", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suite"], "axioms");
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"hom-jacobi") && ids.contains(&"antisymmetry"), "{ids:?}");
}

#[test]
fn text_and_json_reports_agree_on_status() {
    for file in ["heisenberg.json", "broken-twist.json"] {
        let t = hlk(&["check", file, "--suite", "axioms"]);
        let j = hlk(&["check", file, "--suite", "axioms", "--report", "json"]);
        assert_eq!(t.status.code(), j.status.code(), "{file}");
    }
}

#[test]
fn extend_writes_a_heisenberg_type_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ext.json");
    let o = hlk(&["extend", "cocycle-ruth.json", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["type"], "hom_lie_algebra");
    assert_eq!(v["dim"], 3);
    assert_eq!(v["bracket"].as_array().unwrap().len(), 1);
    for suite in ["axioms", "extension"] {
        assert_eq!(hlk(&["check", out.to_str().unwrap(), "--suite", suite]).status.code(), Some(0), "{suite}");
    }
}

#[test]
fn forced_extension_of_bad_data_is_written_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ext.json");
    let o = hlk(&["extend", "bad-k-ruth.json", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
    let o = hlk(&["extend", "bad-k-ruth.json", "-o", out.to_str().unwrap(), "--force"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(out.exists());
    assert!(stdout(&o).contains("hom-jacobi"), "{}", stdout(&o));
}

#[test]
fn generate_to_stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let a = hlk(&["generate", "--family", "heisenberg", "--params", "lambda=2,mu=1/2"]);
    hlk(&["generate", "--family", "heisenberg", "--params", "λ=2,μ=1/2", "-o", out.to_str().unwrap()]);
    assert_eq!(stdout(&a), fs::read_to_string(&out).unwrap());
    assert_eq!(stdout(&a), fs::read_to_string(fixtures().join("heisenberg.json")).unwrap());
}

#[test]
fn cohomology_prints_one_line_per_degree() {
    let o = hlk(&["cohomology", "heisenberg-trivial.json", "--max-degree", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "H^0: 1\nH^1: 2\nH^2: 2\nH^3: 1\nH^4: 0\n");
}

#[test]
fn malformed_inputs_exit_two_with_a_message() {
    for file in ["truncated.json", "unknown-field.json", "no-such-file.json"] {
        let o = hlk(&["check", file, "--suite", "axioms"]);
        assert_eq!(o.status.code(), Some(2), "{file}");
        assert!(!o.stderr.is_empty(), "{file}");
    }
}
