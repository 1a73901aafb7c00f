use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphshare"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_input(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("graphshare-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn gen_then_solve_cycle7() {
    let path = scratch_file("c7.txt", "");
    let o = run(&["gen", "--kind", "cycle7:1000", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("value=1069/3095\n"), "{text}");
    assert!(text.contains("best_start=4\n"));
    assert!(text.contains("start.3.line=F3 S4 "));

    let o = run(&["solve", path.to_str().unwrap(), "--start", "3", "--policy", "first"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("start=3\n"));
    assert_eq!(run(&["solve", path.to_str().unwrap(), "--start", "9"]).status.code(), Some(2));
}

#[test]
fn input_errors_and_ties() {
    let bad = scratch_file("bad.txt", "2 1\n3 5\n0 0\n");
    let o = run(&["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("self-loop"));
    assert_eq!(run(&["solve", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(run(&["solve"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    let tied = scratch_file("tie.txt", "3 2\n2 2 1\n0 1\n1 2\n");
    assert_eq!(run(&["solve", tied.to_str().unwrap()]).status.code(), Some(3));
    let o = run(&["solve", tied.to_str().unwrap(), "--policy", "second"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["solve", tied.to_str().unwrap(), "--policy", "odd"]).status.code(), Some(2));
}

#[test]
fn large_instances_warn() {
    let path = scratch_file("big.txt", "");
    let o = run(&["gen", "--kind", "tree:17", "--seed", "3", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: 17 vertices"));
}

#[test]
fn gen_is_deterministic_and_needs_seeds() {
    let a = run(&["gen", "--kind", "connected:8,3", "--seed", "42"]);
    let b = run(&["gen", "--kind", "connected:8,3", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("# kind=connected:8,3 seed=42\n8 10\n"));
    assert_eq!(run(&["gen", "--kind", "tree:5"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--kind", "cycle7:10"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--kind", "edge:3"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--kind", "wheel:5", "--seed", "1"]).status.code(), Some(2));
    let e = run(&["gen", "--kind", "edge:49,51"]);
    assert_eq!(stdout(&e), "# kind=edge:49,51\n2 1\n49 51\n0 1\n");
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify", "--suite", "edge-family", "--seed", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("suite=edge-family status=PASS cases=50 failures=0\n"));

    let o = run(&["verify", "--suite", "cycle7-family", "--seed", "1", "--param", "m=1000,100000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("record.m100000.value=100069/300095\n"));

    // an invalid family member is a case failure
    let o = run(&["verify", "--suite", "cycle7-family", "--seed", "1", "--param", "m=10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("status=FAIL"));

    assert_eq!(run(&["verify", "--suite", "nope", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--suite", "edge-family", "--seed", "1", "--param", "x"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "--suite", "edge-family"]).status.code(), Some(2));
}

#[test]
fn adversary_command() {
    let args = ["adversary", "--shape", "edge", "--policy", "forbid", "--method", "hill", "--seed", "4", "--iters", "400"];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("2 1\n"));
    assert!(text.contains("shape=edge\nmethod=hill\npolicy=forbid\nseed=4\n"));
    assert_eq!(run(&args).stdout, o.stdout);
    assert_eq!(
        run(&["adversary", "--shape", "star", "--seed", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["adversary", "--shape", "edge", "--method", "anneal", "--seed", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn play_session() {
    let path = scratch_file("edge.txt", "2 1\n49 51\n0 1\n");
    let o = run_with_input(&["play", path.to_str().unwrap(), "--human", "first"], "7\n1\n");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("not a legal vertex").count(), 1);
    assert!(text.contains("engine (second) takes 0"));
    assert!(text.contains("game over: first 51/100 second 49/100"));

    let o = run_with_input(&["play", path.to_str().unwrap(), "--human", "first"], "");
    assert_eq!(o.status.code(), Some(2));

    let tied = scratch_file("tie-play.txt", "3 2\n2 2 1\n0 1\n1 2\n");
    let o = run_with_input(&["play", tied.to_str().unwrap(), "--human", "second"], "1\n");
    assert_eq!(o.status.code(), Some(3));
}
