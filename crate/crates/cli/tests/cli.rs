use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::io::Write;

use semicoop_core::io::read_trajectory_csv;
use semicoop_core::{Point2, ETA};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_semicoop"));
    c.env_remove("SEMICOOP_OUT_DIR");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn point(v: &serde_json::Value) -> Point2 {
    Point2::new(v["x1"].as_f64().unwrap(), v["x2"].as_f64().unwrap())
}

#[test]
fn predict_prints_case_and_limit() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["predict", "--a", "1.2,2.4", "--b", "1.8,2.1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "b_wins (1.8, 2.1)");
}

#[test]
fn betacore_lists_the_two_segments() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["betacore", "--game", "pd"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let segs = v["segments"].as_array().unwrap();
    assert_eq!(segs.len(), 2);
    assert_eq!(point(&segs[0]["a"]), Point2::new(1.0, 2.5));
    assert_eq!(point(&segs[0]["b"]), Point2::new(2.0, 2.0));
    assert_eq!(point(&segs[1]["b"]), Point2::new(2.5, 1.0));
}

#[test]
fn constant_defection_has_closed_form_averages() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["simulate", "--steps", "10", "--p1", "const:D", "--p2", "const:D", "--x0", "3,0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let traj = read_trajectory_csv(text.as_bytes()).unwrap();
    assert_eq!(traj.len(), 10);
    for (i, x) in traj.points.iter().enumerate() {
        let t = (i + 1) as f64;
        // (3,0) at t=1, then (1,1) every round.
        let want = Point2::new((3.0 + (t - 1.0)) / t, (t - 1.0) / t);
        assert!(x.dist(want) <= ETA, "t={t}: {x:?}");
    }
    assert!(traj.recurrence_residual() <= ETA);
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn good_strategies_converge_to_cooperation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["simulate", "--p1", "good:eps=0.1", "--p2", "good:eps=0.1", "--x0", "1,1", "--steps", "1000000"],
    );
    assert!(o.status.success());
    let s = json(&dir.path().join("summary.json"));
    assert!(point(&s["limit"]["point"]).dist(Point2::new(2.0, 2.0)) <= 0.02);
    assert!(s["predicted"].is_null());
}

#[test]
fn egoists_settle_at_the_y_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "simulate",
            "--p1",
            "semicoop:v=2.25,1.5:eps=0.1",
            "--p2",
            "semicoop:v=1.5,2.25:eps=0.1",
            "--steps",
            "1000000",
            "--csv",
            "out/run.csv",
        ],
    );
    assert!(o.status.success());
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["predicted"]["case"], "y_point");
    assert!(s["distance"].as_f64().unwrap() <= 0.05);
    assert!(point(&s["limit"]["point"]).dist(Point2::new(1.0, 1.0)) < 0.3);
    assert!(dir.path().join("out/run.csv").exists());

    // Round trip: the written file satisfies the recurrence.
    let text = std::fs::read_to_string(dir.path().join("out/run.csv")).unwrap();
    assert!(read_trajectory_csv(text.as_bytes()).unwrap().recurrence_residual() <= ETA);
}

#[test]
fn outputs_follow_the_env_directory_and_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("artifacts");
    let go = || {
        let o = bin()
            .current_dir(dir.path())
            .env("SEMICOOP_OUT_DIR", &out)
            .args(["simulate", "--p1", "good:eps=0.2", "--p2", "simple:p=-1,q=1,r=0", "--steps", "5000"])
            .output()
            .unwrap();
        assert!(o.status.success());
        (
            std::fs::read(out.join("trajectory.csv")).unwrap(),
            std::fs::read(out.join("summary.json")).unwrap(),
        )
    };
    assert_eq!(go(), go());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.json");
    std::fs::write(
        &cfg,
        r#"{"p1": "good:eps=0.1", "p2": "const:C", "x0": {"x1": 1.0, "x2": 1.0}, "steps": 50000}"#,
    )
    .unwrap();
    let o = run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--steps", "200"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("summary.json"));
    assert_eq!(s["steps"], 200);

    std::fs::write(&cfg, r#"{"p1": "good:eps=0.1", "speed": 3}"#).unwrap();
    let o = run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_specs_are_usage_errors_with_positions() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["simulate", "--p1", "semicoop:v=1.5:eps=0.1", "--p2", "good:eps=0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 10"));
    assert_eq!(run(dir.path(), &["simulate", "--p1", "good:eps=0.1"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["predict", "--a", "1,2,3", "--b", "1.8,2.1"]).status.code(), Some(1));
    assert!(run(dir.path(), &["--help"]).status.success());
}

#[test]
fn metagame_is_swap_symmetric_with_cooperative_nash() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["metagame", "--n", "5", "--mode", "predicted"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("pure Nash:"));
    let doc = json(&dir.path().join("metagame.json"));
    let cells = doc["matrix"]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 5);
    let m = |i: usize, j: usize| point(&cells[i].as_array().unwrap()[j]["payoff"]);
    for i in 0..5 {
        for j in 0..5 {
            assert!(m(i, j).dist(m(4 - j, 4 - i).swap()) <= 1e-12);
        }
    }
    assert!(doc["pure_nash"].as_array().unwrap().iter().any(|c| c[0] == 2 && c[1] == 2));
    let csv = std::fs::read_to_string(dir.path().join("metagame.csv")).unwrap();
    assert_eq!(csv.lines().count(), 26);
}

#[test]
fn verify_exit_code_tracks_the_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run(dir.path(), &["verify", "--criteria", "7,10", "--steps", "10000"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("PASS   7"));
    let report = json(&dir.path().join("verify.json"));
    assert_eq!(report["passed"], true);

    // The closed-form y distance does not match the geometry.
    let bad = run(dir.path(), &["verify", "--criteria", "6"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stdout(&bad).contains("FAIL   6"));
    assert_eq!(run(dir.path(), &["verify", "--criteria", "11"]).status.code(), Some(1));
}

fn play(dir: &Path, args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .current_dir(dir)
        .arg("play")
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn play_against_a_defector() {
    let dir = tempfile::tempdir().unwrap();
    let o = play(dir.path(), &["--machine", "good:eps=0.1"], "D 3000\nq\n");
    assert!(o.status.success());
    let t = json(&dir.path().join("session.json"));
    assert_eq!(t["rounds"].as_array().unwrap().len(), 3000);
    assert!(t["bounds1"]["liminf_hat"].as_f64().unwrap() >= 0.98);
    assert!(t["checks"].as_array().unwrap().iter().all(|c| c["holds"] == true));
}

#[test]
fn play_with_no_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let o = play(dir.path(), &["--transcript", "t.json"], "q\n");
    assert!(o.status.success());
    let t = json(&dir.path().join("t.json"));
    assert!(t["rounds"].as_array().unwrap().is_empty());
    assert!(t["final_average"].is_null());
}

#[test]
fn plot_is_deterministic_and_marks_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    let sim = ["simulate", "--p1", "good:eps=0.1", "--p2", "good:eps=0.1", "--steps", "20000"];
    assert!(run(dir.path(), &sim).status.success());
    let args = ["plot", "trajectory.csv", "--p1", "good:eps=0.1", "--p2", "good:eps=0.1"];
    assert!(run(dir.path(), &args).status.success());
    let a = std::fs::read(dir.path().join("trajectory.svg")).unwrap();
    assert!(run(dir.path(), &[&args[..], &["-o", "again.svg"]].concat()).status.success());
    let b = std::fs::read(dir.path().join("again.svg")).unwrap();
    assert_eq!(a, b);
    let svg = String::from_utf8(a).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline") && svg.contains(">limit</text>"));

    std::fs::write(dir.path().join("bad.csv"), "t,x1,x2\n1,2\n").unwrap();
    assert_ne!(run(dir.path(), &["plot", "bad.csv"]).status.code(), Some(0));
}
