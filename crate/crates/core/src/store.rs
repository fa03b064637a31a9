//! On-disk snapshot layout.
//!
//! ```text
//! <dir>/meta             JSON: format tag, version, build config
//! <dir>/nodes.ndjson     one node per line, ascending id
//! <dir>/edges.ndjson     one edge per line, ascending (src, kind, dst)
//! <dir>/profiles.ndjson  one cached distribution per line, ascending id
//! <dir>/index.bin        binary search index
//! <dir>/checksums        "<sha256>  <file>" for each file above
//! ```
//!
//! A save writes a sibling temporary directory and swaps it into place, so
//! a reader sees either the old or the new snapshot.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::distribution::TopicDistribution;
use crate::graph::{EdgeRecord, Graph, GraphSnapshot, Node, NodeId, NodeKind};
use crate::inference::Profiles;
use crate::search::SearchIndex;
use crate::snapshot::{BuildConfig, Snapshot, SnapshotError};
use crate::taxonomy::Taxonomy;

pub const FORMAT: &str = "fosgraph-snapshot/1";
const META: &str = "meta";
const NODES: &str = "nodes.ndjson";
const EDGES: &str = "edges.ndjson";
const PROFILES: &str = "profiles.ndjson";
const INDEX: &str = "index.bin";
const CHECKSUMS: &str = "checksums";
const DATA_FILES: [&str; 5] = [META, NODES, EDGES, PROFILES, INDEX];

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no snapshot at {0}")]
    Missing(PathBuf),
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
    #[error("another ingest holds the lock {0}")]
    Locked(PathBuf),
    #[error("snapshot i/o failure: {0}")]
    Io(#[from] io::Error),
}

impl From<SnapshotError> for StoreError {
    fn from(e: SnapshotError) -> Self {
        StoreError::Corrupt(e.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    format: String,
    version: u64,
    config: BuildConfig,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileLine {
    id: NodeId,
    kind: NodeKind,
    distribution: TopicDistribution,
}

fn ndjson<T: Serialize>(items: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut buf = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buf, &item).expect("serializable record");
        buf.push(b'\n');
    }
    buf
}

/// Serialized files in fixed order.
pub fn encode(snapshot: &Snapshot) -> Vec<(&'static str, Vec<u8>)> {
    let meta = Meta {
        format: FORMAT.to_string(),
        version: snapshot.version(),
        config: snapshot.config.clone(),
    };
    let mut meta_bytes = serde_json::to_vec(&meta).expect("serializable meta");
    meta_bytes.push(b'\n');

    let graph = snapshot.graph.to_snapshot();
    let profiles = &snapshot.profiles;
    let mut profile_lines: Vec<ProfileLine> = [
        (NodeKind::Publication, &profiles.publications),
        (NodeKind::Researcher, &profiles.researchers),
        (NodeKind::OrgUnit, &profiles.units),
    ]
    .into_iter()
    .flat_map(|(kind, map)| {
        map.iter().map(move |(id, d)| ProfileLine {
            kind: snapshot.graph.kind_of(id).unwrap_or(kind),
            id: id.clone(),
            distribution: d.clone(),
        })
    })
    .collect();
    profile_lines.sort_by(|a, b| a.id.cmp(&b.id));

    vec![
        (META, meta_bytes),
        (NODES, ndjson(&graph.nodes)),
        (EDGES, ndjson(&graph.edges)),
        (PROFILES, ndjson(&profile_lines)),
        (INDEX, snapshot.index.to_bytes()),
    ]
}

fn checksum_file(files: &[(&str, Vec<u8>)]) -> Vec<u8> {
    let mut out = String::new();
    for (name, bytes) in files {
        writeln!(out, "{}  {}", hex::encode(Sha256::digest(bytes)), name).unwrap();
    }
    out.into_bytes()
}

fn sibling(dir: &Path, suffix: &str) -> PathBuf {
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "snapshot".into());
    dir.with_file_name(format!(".{name}.{suffix}-{}", std::process::id()))
}

/// Writes `snapshot` to `dir`, replacing any snapshot already there.
pub fn save_snapshot(snapshot: &Snapshot, dir: &Path) -> Result<(), StoreError> {
    let files = encode(snapshot);
    let checksums = checksum_file(&files);

    if let Some(parent) = dir.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let staging = sibling(dir, "staging");
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir_all(&staging)?;
    for (name, bytes) in &files {
        write_synced(&staging.join(name), bytes)?;
    }
    write_synced(&staging.join(CHECKSUMS), &checksums)?;

    if dir.exists() {
        let retired = sibling(dir, "retired");
        if retired.exists() {
            fs::remove_dir_all(&retired)?;
        }
        fs::rename(dir, &retired)?;
        fs::rename(&staging, dir)?;
        fs::remove_dir_all(&retired)?;
    } else {
        fs::rename(&staging, dir)?;
    }
    Ok(())
}

/// Exclusive writer lock on a snapshot directory, released on drop.
#[derive(Debug)]
pub struct WriterLock {
    path: PathBuf,
}

impl WriterLock {
    pub fn acquire(dir: &Path) -> Result<Self, StoreError> {
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "snapshot".into());
        let path = dir.with_file_name(format!(".{name}.lock"));
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
        {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id())?;
                Ok(WriterLock { path })
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => Err(StoreError::Locked(path)),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for WriterLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn write_synced(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    f.sync_all()
}

fn read_file(dir: &Path, name: &str) -> Result<Vec<u8>, StoreError> {
    match fs::read(dir.join(name)) {
        Ok(b) => Ok(b),
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            if !dir.join(META).exists() {
                Err(StoreError::Missing(dir.to_path_buf()))
            } else {
                Err(StoreError::Corrupt(format!("missing file {name}")))
            }
        }
        Err(e) => Err(e.into()),
    }
}

fn corrupt(what: &str, e: impl std::fmt::Display) -> StoreError {
    StoreError::Corrupt(format!("{what}: {e}"))
}

fn parse_ndjson<T: for<'de> Deserialize<'de>>(
    name: &str,
    bytes: &[u8],
) -> Result<Vec<T>, StoreError> {
    bytes
        .lines()
        .enumerate()
        .map(|(i, line)| {
            let line = line.map_err(|e| corrupt(name, e))?;
            serde_json::from_str(&line).map_err(|e| corrupt(&format!("{name} line {}", i + 1), e))
        })
        .collect()
}

/// Reads only the version from `meta`; `None` when no snapshot exists.
pub fn read_version(dir: &Path) -> Result<Option<u64>, StoreError> {
    match fs::read(dir.join(META)) {
        Ok(bytes) => {
            let meta: Meta = serde_json::from_slice(&bytes).map_err(|e| corrupt(META, e))?;
            Ok(Some(meta.version))
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Loads and verifies a snapshot written by [`save_snapshot`].
pub fn load_snapshot(dir: &Path) -> Result<Snapshot, StoreError> {
    if !dir.join(META).exists() {
        return Err(StoreError::Missing(dir.to_path_buf()));
    }
    let listed =
        String::from_utf8(read_file(dir, CHECKSUMS)?).map_err(|e| corrupt(CHECKSUMS, e))?;
    let mut expected: BTreeMap<&str, &str> = BTreeMap::new();
    for line in listed.lines() {
        let (sum, name) = line
            .split_once("  ")
            .ok_or_else(|| corrupt(CHECKSUMS, "malformed line"))?;
        expected.insert(name, sum);
    }
    let mut contents: BTreeMap<&str, Vec<u8>> = BTreeMap::new();
    for name in DATA_FILES {
        let bytes = read_file(dir, name)?;
        let sum = hex::encode(Sha256::digest(&bytes));
        if expected.get(name) != Some(&sum.as_str()) {
            return Err(StoreError::Corrupt(format!("checksum mismatch for {name}")));
        }
        contents.insert(name, bytes);
    }

    let meta: Meta = serde_json::from_slice(&contents[META]).map_err(|e| corrupt(META, e))?;
    if meta.format != FORMAT {
        return Err(StoreError::Corrupt(format!(
            "unsupported format `{}`",
            meta.format
        )));
    }
    let nodes: Vec<Node> = parse_ndjson(NODES, &contents[NODES])?;
    let edges: Vec<EdgeRecord> = parse_ndjson(EDGES, &contents[EDGES])?;
    let graph = Graph::from_snapshot(GraphSnapshot {
        nodes,
        edges,
        version: meta.version,
    })
    .map_err(|e| corrupt("graph", e))?;
    let taxonomy = Taxonomy::from_graph(&graph).map_err(|e| corrupt("taxonomy", e))?;

    let mut profiles = Profiles::default();
    for line in parse_ndjson::<ProfileLine>(PROFILES, &contents[PROFILES])? {
        let target = match line.kind {
            NodeKind::Publication => &mut profiles.publications,
            NodeKind::Researcher => &mut profiles.researchers,
            NodeKind::OrgUnit | NodeKind::Institution => &mut profiles.units,
            NodeKind::FieldOfStudy => return Err(corrupt(PROFILES, "profile for a concept")),
        };
        if graph.kind_of(&line.id) != Some(line.kind) {
            return Err(corrupt(
                PROFILES,
                format!("profile for unknown node `{}`", line.id),
            ));
        }
        target.insert(line.id, line.distribution);
    }

    let index = SearchIndex::read_from(contents[INDEX].as_slice(), meta.config.tokenizer.clone())
        .map_err(|e| corrupt(INDEX, e))?;

    Ok(Snapshot {
        graph,
        taxonomy,
        profiles,
        index,
        config: meta.config,
    })
}
