use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nlcert::games::Alphabets;
use nlcert::io::{write_canonical, GameFile, StrategyFile};
use nlcert::strategies::Strategy;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn nlcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlcert")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classical_value_of_chsh() {
    let o = nlcert(&["classical-value", path_str(&fixture("chsh.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("omega_c = 0.75"));
}

#[test]
fn classical_value_of_constant_game() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    let s = Alphabets::new(2, 3, 2, 2).unwrap();
    let g = nlcert::games::Game::new(s, vec![1.0 / 6.0; 6], vec![1.0; s.len()]).unwrap();
    write_canonical(&path, &GameFile::from_game(&g)).unwrap();
    let o = nlcert(&["classical-value", path_str(&path)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("omega_c = 1\n"));
}

#[test]
fn malformed_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"q\": [[0.5, 0.5]], \"h\": ").unwrap();
    let o = nlcert(&["classical-value", path_str(&path)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));

    std::fs::write(&path, "{\"sizes\": {\"a\": 1, \"b\": 1, \"x\": 1, \"y\": 1}, \"q\": [[-1.0]], \"h\": [[[[0.5]]]]}").unwrap();
    assert_eq!(nlcert(&["classical-value", path_str(&path)]).status.code(), Some(2));
    assert_eq!(nlcert(&["classical-value", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(nlcert(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn analyze_chsh_optimum() {
    let o = nlcert(&["analyze", path_str(&fixture("chsh.json")), path_str(&fixture("chsh_opt.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["score"].as_f64().unwrap() - 0.853553).abs() < 1e-6);
    assert!((v["epsilon"].as_f64().unwrap() - 0.146447).abs() < 1e-6);
    assert!((v["c_g"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(v["theorem_bound_holds"], true);
    assert_eq!(v["declassical_bound_holds"], true);
}

#[test]
fn analyze_classical_strategy() {
    let o = nlcert(&["analyze", path_str(&fixture("chsh.json")), path_str(&fixture("classical_det.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["epsilon"].as_f64().unwrap().abs() < 1e-9);
    assert!(v["theorem_gap"].as_f64().unwrap() <= 0.0);
}

#[test]
fn analyze_mismatched_alphabets_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("det3.json");
    let s = Strategy::deterministic(Alphabets::new(3, 2, 2, 2).unwrap(), &[0, 1, 0], &[1, 1]).unwrap();
    write_canonical(&path, &StrategyFile::from_strategy(&s)).unwrap();
    let o = nlcert(&["analyze", path_str(&fixture("chsh.json")), path_str(&path)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn analyze_over_budget_exit_4() {
    let o = nlcert(&[
        "analyze",
        path_str(&fixture("chsh.json")),
        path_str(&fixture("chsh_opt.json")),
        "--max-dim",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn analyze_writes_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = nlcert(&[
            "analyze",
            path_str(&fixture("chsh.json")),
            path_str(&fixture("chsh_opt.json")),
            "--seed",
            "17",
            "--out",
            path_str(out),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn literal_guess_bound_mode() {
    let o = nlcert(&[
        "analyze",
        path_str(&fixture("chsh.json")),
        path_str(&fixture("chsh_opt.json")),
        "--fg-mode",
        "literal",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["guess_bound_mode"], "literal");
    let gap = v["theorem_gap"].as_f64().unwrap();
    assert!((v["guess_bound"].as_f64().unwrap() - (1.0 - gap * gap / 3.0)).abs() < 1e-12);
}

#[test]
fn fixtures_are_canonical() {
    for name in ["chsh.json", "chsh_opt.json", "classical_det.json"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let again = if name == "chsh.json" {
            let f: GameFile = serde_json::from_str(&text).unwrap();
            nlcert::io::to_canonical_string(&GameFile::from_game(&f.to_game().unwrap())).unwrap()
        } else {
            let f: StrategyFile = serde_json::from_str(&text).unwrap();
            nlcert::io::to_canonical_string(&StrategyFile::from_strategy(&f.to_strategy().unwrap().strategy)).unwrap()
        };
        assert_eq!(text, again, "{name}");
    }
    let pr = nlcert::io::load_correlation(&fixture("pr_box.json")).unwrap();
    assert_eq!(pr, nlcert::games::pr_box());
}

#[test]
fn sweep_zero_trials_warns() {
    let o = nlcert(&["sweep", "--check", "theorem", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 trials"));
}

#[test]
fn sweep_reports_and_writes_counterexamples() {
    let dir = tempfile::tempdir().unwrap();
    let ok = nlcert(&["sweep", "--check", "disturbance", "--trials", "30", "--seed", "3", "--out", path_str(dir.path())]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("30/30 passed"));
    assert!(stdout(&ok).contains("worst margin"));

    let bad = nlcert(&[
        "sweep", "--check", "disturbance", "--trials", "30", "--seed", "3", "--rhs-scale", "0.5", "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let written = dir.path().join("counterexamples-disturbance.json");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(written).unwrap()).unwrap();
    assert!(!v["counterexamples"].as_array().unwrap().is_empty());
}

#[test]
fn declassicalize_command() {
    let o = nlcert(&["declassicalize", path_str(&fixture("chsh.json")), path_str(&fixture("chsh_opt.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["pbar_score"].as_f64().unwrap() <= 0.75 + 1e-9);
    assert_eq!(v["bound_holds"], true);
}

#[test]
fn dist_command() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    std::fs::write(
        &path,
        r#"{"states": [[[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]], [[[0.25, 0.0], [0.25, 0.0]], [[0.25, 0.0], [0.25, 0.0]]]]}"#,
    )
    .unwrap();
    let o = nlcert(&["dist", path_str(&path)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let expected = 0.5 + std::f64::consts::SQRT_2 / 4.0;
    assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert_eq!(v["method"], "helstrom");
}
