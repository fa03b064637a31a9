mod common;

use std::fs;

use fosgraph_core::ingest::{ingest_corpus, CorpusPaths};
use fosgraph_core::store::{encode, load_snapshot, read_version, save_snapshot, StoreError};
use fosgraph_core::BuildConfig;
use fosgraph_testkit::Corpus;

#[test]
fn round_trip_is_exact() {
    let (_, out) = common::fixture();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap");
    save_snapshot(&out.snapshot, &path).unwrap();
    let loaded = load_snapshot(&path).unwrap();
    assert!(loaded == out.snapshot);
    assert_eq!(read_version(&path).unwrap(), Some(1));
}

#[test]
fn saving_twice_gives_identical_bytes() {
    let (_, out) = common::fixture();
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    save_snapshot(&out.snapshot, &a).unwrap();
    save_snapshot(&out.snapshot, &b).unwrap();
    save_snapshot(&out.snapshot, &a).unwrap();
    for name in [
        "meta",
        "nodes.ndjson",
        "edges.ndjson",
        "profiles.ndjson",
        "index.bin",
        "checksums",
    ] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    let reloaded = load_snapshot(&a).unwrap();
    assert_eq!(encode(&reloaded), encode(&out.snapshot));
}

#[test]
fn truncated_edges_are_corrupt() {
    let (_, out) = common::fixture();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap");
    save_snapshot(&out.snapshot, &path).unwrap();
    let edges = fs::read(path.join("edges.ndjson")).unwrap();
    fs::write(path.join("edges.ndjson"), &edges[..edges.len() / 2]).unwrap();
    assert!(matches!(load_snapshot(&path), Err(StoreError::Corrupt(_))));
}

#[test]
fn missing_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        load_snapshot(dir.path()),
        Err(StoreError::Missing(_))
    ));
    assert_eq!(read_version(dir.path()).unwrap(), None);

    let (_, out) = common::fixture();
    let path = dir.path().join("snap");
    save_snapshot(&out.snapshot, &path).unwrap();
    fs::remove_file(path.join("index.bin")).unwrap();
    assert!(matches!(load_snapshot(&path), Err(StoreError::Corrupt(_))));
}

#[test]
fn replacing_a_snapshot_bumps_version() {
    let (_, out) = common::fixture();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap");
    save_snapshot(&out.snapshot, &path).unwrap();
    save_snapshot(&out.snapshot.clone().with_version(2), &path).unwrap();
    assert_eq!(read_version(&path).unwrap(), Some(2));
    assert_eq!(load_snapshot(&path).unwrap().version(), 2);
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn shuffled_inputs_give_identical_snapshots() {
    let c = Corpus::fixture();
    let base = common::ingest(&c);
    for seed in 0..4 {
        let shuffled = common::ingest(&c.shuffled(seed));
        assert!(shuffled.snapshot == base.snapshot, "seed {seed}");
        assert_eq!(encode(&shuffled.snapshot), encode(&base.snapshot));
        assert_eq!(shuffled.report, base.report);
    }
}

#[test]
fn repeated_ingest_differs_only_in_version() {
    let c = Corpus::fixture();
    let dir = tempfile::tempdir().unwrap();
    c.write_to(dir.path());
    let paths = CorpusPaths::in_dir(dir.path());
    let a = ingest_corpus(&paths, &BuildConfig::default(), 1).unwrap();
    let b = ingest_corpus(&paths, &BuildConfig::default(), 2).unwrap();
    assert!(a.snapshot != b.snapshot);
    assert!(a.snapshot == b.snapshot.with_version(1));
}

#[test]
fn writer_lock_is_exclusive() {
    use fosgraph_core::store::WriterLock;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap");
    let held = WriterLock::acquire(&path).unwrap();
    assert!(matches!(
        WriterLock::acquire(&path),
        Err(StoreError::Locked(_))
    ));
    drop(held);
    assert!(WriterLock::acquire(&path).is_ok());
}
