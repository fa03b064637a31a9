use std::path::Path;
use std::process::{Command, Output};

use fosgraph_testkit::fixture_dir;
use serde_json::Value;

fn fosgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fosgraph"))
        .args(args)
        .env_remove("FOSGRAPH_BIND")
        .env_remove("FOSGRAPH_SNAPSHOT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ingest_fixture(snapshot: &Path) -> Output {
    let out = fosgraph(&[
        "ingest",
        "--input",
        fixture_dir().to_str().unwrap(),
        "--snapshot",
        snapshot.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn ingest_reports_counts_and_bumps_version() {
    let tmp = tempfile::tempdir().unwrap();
    let snap = tmp.path().join("snap");
    let report: Value = serde_json::from_str(&stdout(&ingest_fixture(&snap))).unwrap();
    assert_eq!(report["snapshot_version"], 1);
    assert_eq!(report["node_counts"]["OrgUnit"], 3);
    assert_eq!(report["node_counts"]["Institution"], 1);
    assert_eq!(report["node_counts"]["Researcher"], 10);
    assert_eq!(report["node_counts"]["Publication"], 30);
    assert_eq!(report["node_counts"]["FieldOfStudy"], 40);
    assert_eq!(report["rejected"].as_array().unwrap().len(), 0);
    assert!(!tmp.path().join("snap.rejects").exists());

    let again: Value = serde_json::from_str(&stdout(&ingest_fixture(&snap))).unwrap();
    assert_eq!(again["snapshot_version"], 2);
    assert!(!tmp.path().join(".snap.lock").exists());
}

#[test]
fn rejected_lines_land_next_to_the_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    let corpus = fosgraph_testkit::Corpus::fixture();
    let mut bad = corpus.clone();
    bad.publications_ndjson
        .push_str("{\"id\":\"pX\",\"title\":\"t\",\"year\":2020,\"author_ids\":[\"nobody\"]}\n");
    bad.write_to(&input);
    let snap = tmp.path().join("snap");
    let out = fosgraph(&[
        "ingest",
        "--input",
        input.to_str().unwrap(),
        "--snapshot",
        snap.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["rejected"].as_array().unwrap().len(), 1);
    let rejected =
        std::fs::read_to_string(tmp.path().join("snap.rejects/publications.ndjson")).unwrap();
    assert!(rejected.contains("\"pX\""));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fosgraph(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fosgraph(&["ingest", "--input", "x"]).status.code(), Some(2));
    assert_eq!(fosgraph(&["search", "q"]).status.code(), Some(2));
    assert_eq!(fosgraph(&["classify"]).status.code(), Some(2));
    assert_eq!(fosgraph(&["--help"]).status.code(), Some(0));
}

#[test]
fn fatal_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("none");
    let out = fosgraph(&["search", "graph", "--snapshot", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let out = fosgraph(&[
        "ingest",
        "--input",
        missing.to_str().unwrap(),
        "--snapshot",
        tmp.path().join("s").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn search_locally() {
    let tmp = tempfile::tempdir().unwrap();
    let snap = tmp.path().join("snap");
    ingest_fixture(&snap);
    let s = snap.to_str().unwrap();

    let empty = fosgraph(&["search", "", "--snapshot", s]);
    assert_eq!(empty.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&empty)).unwrap();
    assert_eq!(v["hits"].as_array().unwrap().len(), 0);
    assert_eq!(v["snapshot_version"], 1);

    let out = fosgraph(&[
        "search",
        "graph neural networks",
        "--snapshot",
        s,
        "--kinds",
        "FieldOfStudy",
        "--limit",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let hits = v["hits"].as_array().unwrap();
    assert!(!hits.is_empty() && hits.len() <= 3);
    assert!(hits.iter().all(|h| h["kind"] == "FieldOfStudy"));
    assert_eq!(
        stdout(&out),
        stdout(&fosgraph(&[
            "search",
            "graph neural networks",
            "--snapshot",
            s,
            "--kinds",
            "FieldOfStudy",
            "--limit",
            "3"
        ]))
    );

    assert_eq!(
        fosgraph(&["search", "x", "--snapshot", s, "--kinds", "Planet"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn trends_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let snap = tmp.path().join("snap");
    ingest_fixture(&snap);
    let out = fosgraph(&[
        "trends",
        "--level",
        "1",
        "--snapshot",
        snap.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("fos_id,year,count"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(!rows.is_empty());
    assert!(rows
        .iter()
        .all(|r| r.len() == 3 && r[2].parse::<f64>().is_ok()));
    let total: f64 = rows.iter().map(|r| r[2].parse::<f64>().unwrap()).sum();
    assert!(total > 0.0);

    let out = fosgraph(&[
        "trends",
        "--level",
        "9",
        "--snapshot",
        snap.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_dry_run_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = fosgraph(&[
        "classify",
        "--dry-run",
        "--input",
        fixture_dir().to_str().unwrap(),
        "--top-k",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines: Vec<Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 30);
    for l in &lines {
        assert!(l["tags"].as_array().unwrap().len() <= 2);
        assert_eq!(l["config"]["top_k"], 2);
    }
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);
    let bad = fosgraph(&[
        "classify",
        "--dry-run",
        "--input",
        fixture_dir().to_str().unwrap(),
        "--threshold",
        "2",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn export_copies_a_verified_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let snap = tmp.path().join("snap");
    ingest_fixture(&snap);
    let copy = tmp.path().join("copy");
    let out = fosgraph(&[
        "export",
        "--snapshot",
        snap.to_str().unwrap(),
        "--out",
        copy.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for entry in std::fs::read_dir(&snap).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            std::fs::read(snap.join(&name)).unwrap(),
            std::fs::read(copy.join(&name)).unwrap()
        );
    }
}

#[test]
fn config_file_supplies_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let snap = tmp.path().join("snap");
    let cfg = tmp.path().join("fosgraph.toml");
    std::fs::write(
        &cfg,
        format!(
            "input = {:?}\nsnapshot = {:?}\ntop_k = 1\n",
            fixture_dir().to_str().unwrap(),
            snap.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = fosgraph(&["--config", cfg.to_str().unwrap(), "ingest"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["config"]["classifier"]["top_k"], 1);

    let out = fosgraph(&["--config", cfg.to_str().unwrap(), "ingest", "--top-k", "3"]);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["config"]["classifier"]["top_k"], 3);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(
        fosgraph(&["--config", cfg.to_str().unwrap(), "ingest"])
            .status
            .code(),
        Some(1)
    );
}
