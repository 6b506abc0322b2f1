use std::path::PathBuf;
use std::process::Command;

use serde_json::Value as Json;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_str().unwrap().to_string()
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_with(args: &[&str], stdin: &str) -> Out {
    let mut argv = vec!["gamesolve"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = gamesolve_cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn run(args: &[&str]) -> Out {
    run_with(args, "")
}

fn tmp(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("gamesolve-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn solve_delay_all_engines() {
    let f = fixture("delay.game");
    for engine in ["recursive", "oracle"] {
        let o = run(&["solve", "-i", &f, "--engine", engine]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert_eq!(o.stdout, "{\"values\":{\"q1\":\"1/1\",\"q2\":\"1/1\"}}\n");
    }
    // without the parity condition q1 -> q1 forever is best
    let o = run(&["solve", "-i", &f, "--engine", "mp"]);
    assert_eq!(o.stdout, "{\"values\":{\"q1\":\"1/1\",\"q2\":\"1/1\"}}\n");
}

#[test]
fn solve_blocking_from_stdin() {
    let text = std::fs::read_to_string(fixture("blocking.game")).unwrap();
    let o = run_with(&["solve", "-i", "-"], &text);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout, "{\"values\":{\"q1\":\"0/1\",\"q2\":\"0/1\"}}\n");
}

#[test]
fn witness_round_trip_through_files() {
    let f = fixture("delay.game");
    let w = tmp("w.json");
    assert_eq!(run(&["witness", "-i", &f, "--threshold", "1", "-o", &w]).code, 0);
    let ok = run(&["verify-np", "-i", &f, "--witness", &w, "--state", "q1", "--threshold", "1"]);
    assert_eq!((ok.code, ok.stdout.as_str()), (0, "accept\n"));
    let no = run(&["verify-np", "-i", &f, "--witness", &w, "--state", "q1", "--threshold", "3/2"]);
    assert_eq!(no.code, 1);
    assert!(no.stdout.starts_with("reject"));
    let none = run(&["witness", "-i", &f, "--threshold", "3/2"]);
    assert_eq!(none.code, 1);
}

#[test]
fn malformed_witness_is_a_usage_error() {
    let f = fixture("delay.game");
    let w = tmp("bad.json");
    std::fs::write(&w, "{\"threshold\": 1}").unwrap();
    let o = run(&["verify-np", "-i", &f, "--witness", &w, "--state", "q1", "--threshold", "1"]);
    assert_eq!(o.code, 2);
}

#[test]
fn conp_with_extracted_strategy() {
    let f = fixture("delay.game");
    let t = tmp("tau.txt");
    assert_eq!(run(&["strategy", "-i", &f, "--player", "2", "-o", &t]).code, 0);
    let above = run(&["verify-conp", "-i", &f, "--strategy", &t, "--state", "q1", "--threshold", "2"]);
    assert_eq!(above.code, 0);
    let at = run(&["verify-conp", "-i", &f, "--strategy", &t, "--state", "q1", "--threshold", "1"]);
    assert_eq!(at.code, 1);
    // Player 1 has no memoryless optimal strategy here
    assert_eq!(run(&["strategy", "-i", &f, "--player", "1"]).code, 2);
}

#[test]
fn reductions_agree_with_direct_solve() {
    let f = fixture("blocking.game");
    for kind in ["exp", "poly"] {
        let o = run(&["reduce", "-i", &f, "--kind", kind]);
        assert_eq!(o.code, 0);
        let solved = run_with(&["solve", "-i", "-"], &o.stdout);
        let v: Json = serde_json::from_str(&solved.stdout).unwrap();
        // values are negated penalties
        assert_eq!(v["values"]["q1"], "0/1");
        assert_eq!(v["values"]["q2"], "0/1");
    }
    assert_eq!(run(&["reduce", "-i", &fixture("delay.game"), "--kind", "exp"]).code, 2);
}

#[test]
fn simulate_rounds_reports_round_ends() {
    let o = run(&[
        "simulate", "-i", &fixture("delay.game"), "--start", "q1", "--horizon", "12", "--rounds", "q2",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let doc: Json = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(doc["states"].as_array().unwrap().len(), 13);
    assert_eq!(doc["round_ends"], serde_json::json!([2, 5, 9]));
    assert_eq!(doc["means"][12], "1/3");

    let p = run(&[
        "simulate", "-i", &fixture("blocking.game"), "--start", "q1", "--horizon", "6", "--rounds", "q2",
    ]);
    assert_eq!(p.code, 0, "{}", p.stderr);
    let doc: Json = serde_json::from_str(&p.stdout).unwrap();
    assert_eq!(doc["blocked"].as_array().unwrap().len(), 6);
}

#[test]
fn simulate_with_strategy_files() {
    let f = fixture("delay.game");
    let s = tmp("loop.txt");
    std::fs::write(&s, "# stay\nq1 -> q1\nq2 -> q1\n").unwrap();
    let o = run(&["simulate", "-i", &f, "--start", "q1", "--horizon", "4", "--p1", &s]);
    let doc: Json = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(doc["sums"], serde_json::json!([0, 1, 2, 3, 4]));
    assert_eq!(doc["window_min_priority"], 1);
}

#[test]
fn eval_strategies() {
    let f = fixture("delay.game");
    let s = tmp("sigma.txt");
    std::fs::write(&s, "q1 -> q1\nq2 -> q1\n").unwrap();
    let o = run(&["eval-strategy", "-i", &f, "--strategy", &s]);
    assert_eq!(o.stdout, "{\"values\":{\"q1\":\"-inf\",\"q2\":\"-inf\"}}\n");
    let o = run(&["eval-strategy", "-i", &f, "--strategy", &s, "--mp"]);
    assert_eq!(o.stdout, "{\"values\":{\"q1\":\"1/1\",\"q2\":\"1/1\"}}\n");

    let blocking = fixture("blocking.game");
    let m = tmp("multi.txt");
    std::fs::write(&m, "q1 -> {q2}\n").unwrap();
    let o = run(&["eval-multi", "-i", &blocking, "--strategy", &m]);
    assert_eq!(o.stdout, "{\"values\":{\"q1\":\"1/1\",\"q2\":\"1/1\"}}\n");
}

#[test]
fn gen_is_deterministic() {
    let args = [
        "gen", "--states", "5", "--degree", "2", "--max-weight", "3", "--priorities", "3", "--seed", "11",
    ];
    let a = run(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, run(&args).stdout);
    let p = run(&[
        "gen", "--states", "4", "--degree", "2", "--max-weight", "3", "--priorities", "2", "--kind",
        "penalty", "--seed", "1",
    ]);
    assert!(p.stdout.contains("kind mean-penalty-parity"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["solve", "-i", "/nonexistent/game"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    let o = run_with(&["solve", "-i", "-"], "mppg v1\nkind mean-payoff-parity\nstate a owner=3 priority=0\n");
    assert_eq!(o.code, 2);
    assert!(!o.stderr.is_empty());
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_gamesolve");
    let out = Command::new(bin)
        .args(["solve", "--input", &fixture("delay.game")])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "{\"values\":{\"q1\":\"1/1\",\"q2\":\"1/1\"}}\n");
    let bad = Command::new(bin).arg("solve").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
