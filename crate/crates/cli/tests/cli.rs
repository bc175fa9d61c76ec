use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SAMPLE: &str = "# sample function\nn=3\nperm: 1 0 3 2 5 7 4 6\n";
const FREDKIN: &str = "n=3\nperm: 0 1 2 5 4 3 6 7\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revsynth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gates(text: &str) -> Vec<&str> {
    text.lines().filter(|l| l.starts_with("TOF")).collect()
}

#[test]
fn synth_discovery_order_lists_gates_as_found() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "f.spec", SAMPLE);
    let o = run(&["synth", s(&spec), "--order", "discovery"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("n=3\norder=discovery\n"));
    assert_eq!(
        gates(&out),
        [
            "TOF(b',c';a)",
            "TOF(b,c';a)",
            "TOF(a,c;b)",
            "TOF(b,c;a)",
            "TOF(a',c;b)"
        ]
    );
    assert!(stderr(&o).contains("verified: ok"));
}

#[test]
fn synth_output_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "f.spec", SAMPLE);
    for alg in ["1", "2", "random"] {
        for dir_arg in ["output", "input"] {
            let circ = dir.path().join(format!("{alg}-{dir_arg}.circ"));
            let o = run(&[
                "synth",
                s(&spec),
                "-a",
                alg,
                "--direction",
                dir_arg,
                "--reduce",
                "-o",
                s(&circ),
            ]);
            assert!(o.status.success(), "{}", stderr(&o));
            let v = run(&["verify", s(&circ), s(&spec)]);
            assert!(v.status.success(), "{}", stderr(&v));
            assert_eq!(stdout(&v), "pass\n");
        }
    }
}

#[test]
fn synth_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "f.spec", SAMPLE);
    let args = [
        "synth",
        s(&spec),
        "-a",
        "random",
        "--seed",
        "7",
        "--restarts",
        "5",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn identity_gives_empty_circuit() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "id.spec", "n=2\nperm: 0 1 2 3\n");
    let o = run(&["synth", s(&spec)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n=2\norder=input-to-output\n");
}

#[test]
fn non_reversible_spec_is_rejected() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "bad.spec", "n=3\nperm: 0 1 1 3 4 5 6 7\n");
    let o = run(&["synth", s(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not reversible"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_input_reports_line() {
    let dir = TempDir::new().unwrap();
    let circ = file(&dir, "x.circ", "n=3\nTOF(a;b)\nTOF(a;q)\n");
    let o = run(&["simulate", s(&circ)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn unknown_flag_exits_one() {
    let o = run(&["synth", "x.spec", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reduce_drops_redundant_controls() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "fred.spec", FREDKIN);
    let circ = file(
        &dir,
        "fred.circ",
        "n=3\norder=discovery\nTOF(a,c';b)\nTOF(a,b';c)\nTOF(a,c';b)\n",
    );
    let o = run(&["reduce", s(&circ), s(&spec)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let g = gates(&out);
    assert_eq!(g.len(), 3);
    assert!(g.iter().map(|t| t.matches(',').count()).sum::<usize>() < 6);
    let reduced = file(&dir, "r.circ", &out);
    assert!(run(&["verify", s(&reduced), s(&spec)]).status.success());
}

#[test]
fn reduce_removes_useless_pair() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "u.spec", "n=3\nperm: 0 5 2 7 4 1 6 3\n");
    let circ = file(&dir, "u.circ", "n=3\nTOF(a;c)\nTOF(b;a)\nTOF(b;a)\n");
    let o = run(&["reduce", s(&circ), s(&spec)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(gates(&stdout(&o)), ["TOF(a;c)"]);
}

#[test]
fn reduce_of_empty_circuit_is_empty() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "id.spec", "n=3\nperm: 0 1 2 3 4 5 6 7\n");
    let circ = file(&dir, "e.circ", "n=3\n");
    let o = run(&["reduce", s(&circ), s(&spec)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(gates(&stdout(&o)).is_empty());
}

#[test]
fn reduce_refuses_mismatched_circuit() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "f.spec", FREDKIN);
    let circ = file(&dir, "x.circ", "n=3\nTOF(a,b;c)\n");
    let o = run(&["reduce", s(&circ), s(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not realize"));
}

#[test]
fn invert_and_simulate() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "f.spec", SAMPLE);
    let o = run(&["invert", s(&spec)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n=3\nperm: 1 0 3 2 6 4 7 5\n");

    let circ = file(&dir, "n.circ", "n=2\nTOF(;a)\n");
    let o = run(&["simulate", s(&circ), "--table"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("00 -> 01"), "{}", stdout(&o));
}

#[test]
fn verify_failure_exits_one() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "f.spec", SAMPLE);
    let circ = file(&dir, "x.circ", "n=3\nTOF(;a)\n");
    let o = run(&["verify", s(&circ), s(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fail"));
}

#[test]
fn oracle_finds_short_circuit() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "s.spec", "n=3\nperm: 0 1 2 4 3 5 6 7\n");
    let o = run(&["oracle", s(&spec)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(gates(&out).len() <= 5);
    let c = file(&dir, "o.circ", &out);
    assert!(run(&["verify", s(&c), s(&spec)]).status.success());
}

#[test]
fn oracle_rejects_wide_specs() {
    let dir = TempDir::new().unwrap();
    let table: Vec<String> = (0..16).map(|v| v.to_string()).collect();
    let spec = file(&dir, "w.spec", &format!("n=4\nperm: {}\n", table.join(" ")));
    let o = run(&["oracle", s(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unsupported width"));
}

#[test]
fn bench_two_lines_writes_csv() {
    let o = run(&["bench", "--n", "2", "--reduce"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "perm_rank,raw_gates_alg1,raw_gates_alg2,reduced_gates,optimal_gates"
    );
    assert_eq!(lines.len(), 25);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 5));
}
