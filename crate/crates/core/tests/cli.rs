use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qmds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmds")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn construct_writes_matrix_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    let out = qmds(&["construct", "--p", "3", "--n", "4", "--format", "machine", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read_to_string(&path).unwrap(),
        "p=3 r=1 n=4 modulus=2,1,1\n1 1 1 0\n0 1 2 1\ncase=Q3_TABLE(4) repaired=0\n"
    );
    let cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("h.txt.cert")).unwrap()).unwrap();
    assert_eq!(cert["passes"], true);
    assert_eq!(cert["quantum"]["k"], 0);
    assert_eq!(cert["case"], "Q3_TABLE(4)");
}

#[test]
fn verify_round_trip_matches_construct_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    let p = path.to_str().unwrap();
    assert_eq!(code(&qmds(&["construct", "--p", "7", "--n", "31", "--format", "machine", "--out", p])), 0);
    let out = qmds(&["verify", p, "--format", "machine"]);
    assert_eq!(code(&out), 0);
    assert_eq!(out.stdout, fs::read(dir.path().join("m.txt.cert")).unwrap());
}

#[test]
fn verify_rejects_a_bad_matrix_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "p=3 r=1 n=4 modulus=2,1,1\n1 1 1 1\n0 1 2 1\n").unwrap();
    let out = qmds(&["verify", path.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(code(&out), 1);
    let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["passes"], false);
}

#[test]
fn parse_errors_exit_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "p=3 r=1 n=4 modulus=2,1,1\n1 1 x 0\n0 1 2 1\n").unwrap();
    let out = qmds(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 2") && msg.contains("column 5"), "{msg}");
    assert_eq!(code(&qmds(&["verify", "/nonexistent/file"])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&qmds(&[])), 2);
    assert_eq!(code(&qmds(&["construct", "--p", "3"])), 2);
    assert_eq!(code(&qmds(&["construct", "--p", "3", "--n", "3"])), 2);
    assert_eq!(code(&qmds(&["construct", "--p", "3", "--n", "11"])), 2);
    assert_eq!(code(&qmds(&["construct", "--p", "9", "--n", "5"])), 2);
    assert_eq!(code(&qmds(&["sweep", "--p", "5", "--jobs", "0"])), 2);
    assert_eq!(code(&qmds(&["sweep", "--p", "5", "--format", "yaml"])), 2);
}

#[test]
fn even_characteristic_is_refused_or_marked() {
    assert_eq!(code(&qmds(&["construct", "--p", "2", "--r", "2", "--n", "5"])), 1);
    assert_eq!(code(&qmds(&["search", "--p", "2", "--r", "1", "--n", "4"])), 2);
    let out = qmds(&["search", "--p", "2", "--r", "1", "--n", "4", "--allow-even-q", "--format", "machine"]);
    assert_eq!(code(&out), 0);
    let first = String::from_utf8_lossy(&out.stdout).lines().next().unwrap().to_string();
    let summary: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(summary["experimental"], qmds::format::EXPERIMENTAL_MARKER);
}

#[test]
fn sweep_machine_output_is_stable_across_job_counts() {
    let a = qmds(&["sweep", "--p", "5", "--jobs", "1", "--format", "machine"]);
    let b = qmds(&["sweep", "--p", "5", "--jobs", "4", "--format", "machine"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 23 + 2);
    assert!(lines[0].contains("\"kind\":\"sweep\""));
    assert!(lines[24].contains("\"failed\":0"));
    let ns: Vec<u64> = lines[1..24]
        .iter()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["n"].as_u64().unwrap())
        .collect();
    assert_eq!(ns, (4..=26).collect::<Vec<_>>());
}

#[test]
fn sweep_to_file_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    assert_eq!(code(&qmds(&["sweep", "--p", "3", "--format", "machine", "--out", path.to_str().unwrap()])), 0);
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 9);
    let out = qmds(&["sweep", "--p", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Q3_TABLE(10)") && text.contains("[[10, 6, 3]]_3 MDS"));
}

#[test]
fn lemmas_pass() {
    let out = qmds(&["lemmas", "--p", "3", "--r", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("PASS").count(), 3);
    let out = qmds(&["lemmas", "--p", "7", "--format", "machine"]);
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["fibres"].as_array().unwrap().len(), 6);
}

#[test]
fn search_writes_match_files_that_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("found");
    let out = qmds(&["search", "--p", "3", "--n", "4", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let files: Vec<_> = fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 64);
    for f in files.iter().take(5) {
        assert_eq!(code(&qmds(&["verify", f.to_str().unwrap()])), 0, "{}", f.display());
    }
}

#[test]
fn randomized_search_is_seeded() {
    let args = ["search", "--p", "5", "--n", "6", "--mode", "randomized", "--seed", "11", "--max-candidates", "20000", "--format", "machine"];
    let a = qmds(&args);
    let b = qmds(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(Path::new(env!("CARGO_BIN_EXE_qmds")).exists());
}
