use std::fs;
use std::path::PathBuf;

use assert_cmd::Command;
use tempfile::tempdir;

use dagrecover::{fixtures, io};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn cli() -> Command {
    Command::cargo_bin("dagrecover").unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = cli()
        .args(args)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    String::from_utf8(out).unwrap()
}

fn stderr_of_failure(args: &[&str]) -> String {
    let out = cli()
        .args(args)
        .assert()
        .failure()
        .get_output()
        .stderr
        .clone();
    String::from_utf8(out).unwrap()
}

#[test]
fn shipped_graphs_match_fixtures() {
    let read = |n| fs::read_to_string(data(n)).unwrap();
    assert_eq!(
        io::dag_from_json(&read("fig1.json")).unwrap(),
        fixtures::fig1_dag()
    );
    assert_eq!(
        io::pdag_from_json(&read("fig6.json")).unwrap(),
        fixtures::fig6_pdag()
    );
    assert_eq!(
        io::pdag_from_json(&read("fig8.json")).unwrap(),
        fixtures::fig8_pdag()
    );
}

#[test]
fn recover_with_dsep_oracle_gives_fig6_dot() {
    let truth = data("fig1.json");
    let dot = stdout_of(&[
        "recover",
        "--oracle",
        "dsep",
        "--truth",
        truth.to_str().unwrap(),
        "--format",
        "dot",
    ]);
    assert_eq!(dot, io::pdag_to_dot(&fixtures::fig6_pdag()));
}

#[test]
fn recover_writes_report() {
    let dir = tempdir().unwrap();
    let truth = data("fig1.json");
    let report = dir.path().join("report");
    let json = stdout_of(&[
        "recover",
        "--oracle",
        "dsep",
        "--truth",
        truth.to_str().unwrap(),
        "--report-dir",
        report.to_str().unwrap(),
    ]);
    assert_eq!(io::pdag_from_json(&json).unwrap(), fixtures::fig6_pdag());
    let graph = fs::read_to_string(report.join("graph.json")).unwrap();
    assert_eq!(graph, json);
    let trace = fs::read_to_string(report.join("trace.txt")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[5], "RULE IIc: X6 -> X8");
    assert_eq!(lines[8], "RULE V: X10 -> X9");
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["queries_total"], 283);
    let sepsets: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report.join("sepsets.json")).unwrap()).unwrap();
    assert_eq!(sepsets.as_array().unwrap().len(), 45 - 14);
}

#[test]
fn skeleton_subcommand() {
    let truth = data("fig1.json");
    let json = stdout_of(&[
        "skeleton",
        "--oracle",
        "dsep",
        "--truth",
        truth.to_str().unwrap(),
    ]);
    let g = io::ugraph_from_json(&json).unwrap();
    assert_eq!(g, fixtures::fig2_skeleton());
}

#[test]
fn dsep_answers_queries() {
    let truth = data("fig1.json");
    let t = truth.to_str().unwrap();
    assert_eq!(
        stdout_of(&["dsep", "--truth", t, "--query", "X1 _||_ X7 | "]),
        "separated\n"
    );
    assert_eq!(
        stdout_of(&["dsep", "--truth", t, "--query", "X1 _||_ X7 | X8"]),
        "connected\n"
    );
    let dir = tempdir().unwrap();
    let qf = dir.path().join("q.txt");
    fs::write(&qf, "# batch\nX4 _||_ X5 | X10\n\nX4 _||_ X5\n").unwrap();
    assert_eq!(
        stdout_of(&["dsep", "--truth", t, "--queries", qf.to_str().unwrap()]),
        "separated\nconnected\n"
    );
}

#[test]
fn extend_and_enumerate() {
    let dir = tempdir().unwrap();
    let fig6 = data("fig6.json");
    let report = dir.path().join("ext");
    let json = stdout_of(&[
        "extend",
        "--graph",
        fig6.to_str().unwrap(),
        "--report-dir",
        report.to_str().unwrap(),
    ]);
    let dag = io::dag_from_json(&json).unwrap();
    assert!(dagrecover::markov_equivalent(&dag, &fixtures::fig1_dag()).unwrap());
    let records: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report.join("removals.json")).unwrap()).unwrap();
    assert_eq!(records.as_array().unwrap().len(), 10);

    let fig8 = data("fig8.json");
    let all: serde_json::Value = serde_json::from_str(&stdout_of(&[
        "enumerate",
        "--graph",
        fig8.to_str().unwrap(),
    ]))
    .unwrap();
    assert_eq!(all.as_array().unwrap().len(), 3);
}

#[test]
fn simulate_then_recover_with_fisher_z() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("sim");
    cli()
        .args([
            "simulate", "--nodes", "6", "--prob", "0.4", "--rows", "2000", "--seed", "5",
        ])
        .args(["--out-dir", out.to_str().unwrap()])
        .assert()
        .success();
    let truth = fs::read_to_string(out.join("truth.json")).unwrap();
    assert!(io::dag_from_json(&truth).is_ok());
    let csv = out.join("data.csv");
    let first = fs::read_to_string(&csv).unwrap();
    cli()
        .args([
            "simulate", "--nodes", "6", "--prob", "0.4", "--rows", "2000", "--seed", "5",
        ])
        .args(["--out-dir", out.to_str().unwrap()])
        .assert()
        .success();
    assert_eq!(fs::read_to_string(&csv).unwrap(), first);
    let json = stdout_of(&[
        "recover",
        "--oracle",
        "fisherz",
        "--data",
        csv.to_str().unwrap(),
    ]);
    assert!(io::pdag_from_json(&json).is_ok());
}

#[test]
fn diagnostics_carry_prefixes() {
    let dir = tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let err = stderr_of_failure(&[
        "recover",
        "--oracle",
        "fisherz",
        "--data",
        missing.to_str().unwrap(),
    ]);
    assert!(err.starts_with("IO:"), "{err}");

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let err = stderr_of_failure(&[
        "recover",
        "--oracle",
        "dsep",
        "--truth",
        bad.to_str().unwrap(),
    ]);
    assert!(err.starts_with("PARSE:"), "{err}");

    let cyclic = dir.path().join("cyclic.json");
    fs::write(
        &cyclic,
        r#"{"nodes": ["a", "b"], "directed": [["a", "b"], ["b", "a"]]}"#,
    )
    .unwrap();
    let err = stderr_of_failure(&[
        "dsep",
        "--truth",
        cyclic.to_str().unwrap(),
        "--query",
        "a _||_ b",
    ]);
    assert!(err.starts_with("GRAPH:"), "{err}");

    let stuck = dir.path().join("stuck.json");
    fs::write(
        &stuck,
        r#"{"nodes": ["a", "b", "c", "d"], "directed": [["a", "b"], ["d", "c"]], "undirected": [["b", "c"]]}"#,
    )
    .unwrap();
    let err = stderr_of_failure(&["extend", "--graph", stuck.to_str().unwrap()]);
    assert!(err.starts_with("INEXTENSIBLE:"), "{err}");

    // b = 2a and c tracks a, so separating a from c conditions on b
    let rows = "a,b,c\n1,2,1.1\n2,4,1.8\n3,6,3.15\n4,8,4\n5,10,4.9\n6,12,6.05\n";
    let singular = dir.path().join("singular.csv");
    fs::write(&singular, rows).unwrap();
    let err = stderr_of_failure(&[
        "recover",
        "--oracle",
        "fisherz",
        "--data",
        singular.to_str().unwrap(),
    ]);
    assert!(err.starts_with("ORACLE:"), "{err}");

    let err = stderr_of_failure(&["recover", "--oracle", "dsep"]);
    assert!(err.starts_with("USAGE:"), "{err}");
    let err = stderr_of_failure(&["recover", "--oracle", "bogus"]);
    assert!(err.starts_with("USAGE:"), "{err}");
}
