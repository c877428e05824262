use std::path::Path;
use std::process::{Command, Output};

fn arena(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arena")).args(args).output().expect("arena runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_run_analyze_replay() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("scenarios");
    std::fs::create_dir(&scen).unwrap();
    for (family, seed) in [("jobhunt", "1"), ("targetqty", "2")] {
        let file = scen.join(format!("{family}.json"));
        let o = arena(&["scenario", "gen", "--family", family, "--edges", "2", "--seed", seed, "--out", p(&file)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        multideal::scenario::load_scenario(&file).unwrap();
    }
    let out = dir.path().join("out");
    let o = arena(&[
        "tournament", "--agents", "contingent,conceder,random", "--scenario-dir", p(&scen),
        "--reps", "2", "--deadline", "15", "--seed", "3", "--jobs", "2", "--out", p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("rank"));
    let log = out.join("matches.jsonl");
    let lines = std::fs::read_to_string(&log).unwrap();
    assert_eq!(lines.lines().count(), 2 * 2 * 3);

    let o = arena(&["analyze", "--matches", p(&log), "--nash", "--pareto"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("pareto efficient deals"));

    let o = arena(&["replay", "--match", p(&log), "--line", "4"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("identical"));
    let line = lines.lines().next().unwrap();
    assert_eq!(code(&arena(&["replay", "--match", line])), 0);

    // a tampered score is a replay mismatch
    let mut v: serde_json::Value = serde_json::from_str(line).unwrap();
    v["result"]["center_utility"] = serde_json::json!(0.123);
    let tampered = dir.path().join("bad.jsonl");
    std::fs::write(&tampered, format!("{v}\n")).unwrap();
    assert_eq!(code(&arena(&["replay", "--match", p(&tampered)])), 1);

    assert_eq!(code(&arena(&["replay", "--match", p(&log), "--line", "999"])), 2);
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let gen = ["--gen", "jobhunt:1", "--out", p(&out)];
    let run = |extra: &[&str]| {
        let mut args = vec!["tournament"];
        args.extend_from_slice(extra);
        code(&arena(&args))
    };
    assert_eq!(run(&[&["--agents", "random,wizard"][..], &gen].concat()), 2);
    assert_eq!(run(&[&["--agents", "random"][..], &gen].concat()), 2);
    assert_eq!(run(&[&["--agents", "random,conceder", "--reps", "0"][..], &gen].concat()), 2);
    assert_eq!(run(&["--agents", "random,conceder", "--gen", "chess:2", "--out", p(&out)]), 2);
    let missing = dir.path().join("missing");
    assert_eq!(run(&["--agents", "random,conceder", "--scenario-dir", p(&missing), "--out", p(&out)]), 3);
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(run(&["--agents", "random,conceder", "--scenario-dir", p(&empty), "--out", p(&out)]), 2);
    let file = dir.path().join("file");
    std::fs::write(&file, "").unwrap();
    assert_eq!(run(&["--agents", "random,conceder", "--gen", "jobhunt:1", "--out", p(&file)]), 3);
    assert_eq!(code(&arena(&["analyze", "--matches", p(&missing)])), 3);
    assert_eq!(code(&arena(&["analyze", "--matches", p(&file)])), 0);
    std::fs::write(&file, "{not json}\n").unwrap();
    assert_eq!(code(&arena(&["analyze", "--matches", p(&file)])), 2);
    assert_eq!(code(&arena(&["scenario", "gen", "--family", "jobhunt", "--edges", "0", "--out", p(&file)])), 2);
}
