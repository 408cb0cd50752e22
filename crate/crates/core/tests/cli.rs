//! Black-box tests of the `scg` binary: exit codes, output formats and the
//! subcommand round-trips.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scg"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// A two-player identity congestion game on three resources: player 0
/// picks {0} or {0,1}, player 1 picks {1,2} or {2}.
fn congestion_fixture(dir: &Path) -> String {
    let path = dir.join("game.json");
    let spec = serde_json::json!({
        "resources": 3,
        "delays": [
            {"a": "1", "b": "0"},
            {"a": "1", "b": "0"},
            {"a": "1", "b": "0"}
        ],
        "strategies": [
            [[0], [0, 1]],
            [[1, 2], [2]]
        ]
    });
    std::fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn poa_reports_ratio_and_digest() {
    let dir = tempfile::tempdir().unwrap();
    let game = congestion_fixture(dir.path());
    let out = run(&["poa", "--game", &game]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["results"]["poa"]["kind"], "ratio");
    assert_eq!(report["seed"], 0);
    assert_eq!(report["digest"].as_str().unwrap().len(), 64);
    let nash = report["results"]["equilibria"]["pure_nash"].as_array().unwrap();
    assert!(!nash.is_empty());
}

#[test]
fn csv_format_emits_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let game = congestion_fixture(dir.path());
    let out = run(&["--format", "csv", "poa", "--game", &game]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("row,claimed,observed,verdict"));
    assert!(lines.next().is_some());
}

#[test]
fn smoothness_verifies_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let game = congestion_fixture(dir.path());
    let good = run(&[
        "smoothness", "--game", &game, "--lambda", "17/5", "--mu", "2/5", "--scg",
    ]);
    assert_eq!(code(&good), 0, "stderr: {}", String::from_utf8_lossy(&good.stderr));
    assert_eq!(stdout_json(&good)["results"]["verdict"], "PASS");

    let bad = run(&["smoothness", "--game", &game, "--lambda", "1/10", "--mu", "0", "--scg"]);
    assert_eq!(code(&bad), 1);
    let report = stdout_json(&bad);
    assert_eq!(report["results"]["verdict"], "FAIL");
    assert!(report["results"]["witness"].is_array());
}

#[test]
fn scg_check_reports_boundedness() {
    let dir = tempfile::tempdir().unwrap();
    let game = congestion_fixture(dir.path());
    let out = run(&["scg-check", "--game", &game, "--strong"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["results"]["sc_bounded"], true);
    assert_eq!(report["results"]["strongly_sc_bounded"], true);
}

#[test]
fn family_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("fam");
    let out = run(&[
        "family",
        "--family",
        "congestion17",
        "--param",
        "1",
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for name in ["instance.json", "alpha.json", "profiles.json"] {
        assert!(outdir.join(name).exists(), "missing {name}");
    }
}

#[test]
fn family_verifies_other_constructions() {
    for (family, param) in [("schedB", "3"), ("auctionTight", "2"), ("mixedLB", "4")] {
        let out = run(&["family", "--family", family, "--param", param]);
        assert_eq!(
            code(&out),
            0,
            "family {family} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn dynamics_converges_on_potential_game() {
    let dir = tempfile::tempdir().unwrap();
    let game = congestion_fixture(dir.path());
    let out = run(&["dynamics", "--game", &game]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["results"]["converged"], true);
}

#[test]
fn missing_file_is_an_input_error() {
    let out = run(&["poa", "--game", "/nonexistent/game.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn tiny_budget_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let game = congestion_fixture(dir.path());
    let out = run(&["--budget", "1", "poa", "--game", &game]);
    assert_eq!(code(&out), 3);
}

#[test]
fn table_game_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    // two-player matching game: coordinate for cost 1 each, clash for 3
    let spec = serde_json::json!({
        "players": 2,
        "strategies": [2, 2],
        "costs": [
            ["1", "3", "3", "1"],
            ["1", "3", "3", "1"]
        ],
        "social": "sum",
        "orientation": "min"
    });
    std::fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
    let out = run(&["poa", "--game", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["results"]["poa"]["kind"], "ratio");
    assert_eq!(report["results"]["poa"]["value"], "1");
}
