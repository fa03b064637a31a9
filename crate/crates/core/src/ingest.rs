//! Builds a snapshot from institution data files.
//!
//! Order: taxonomy, org units, researchers, publications, classification,
//! inference, index. Invalid entity records are skipped and reported; only
//! an unreadable file or an invalid taxonomy aborts the run. Records are
//! processed by id, so line order within a file never affects the result.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{
    Classification, Classifier, ClassifierConfig, ClassifyError, PublicationText,
};
use crate::graph::{props, EdgeKind, GraphBuilder, NodeId, NodeKind, PropValue, Props};
use crate::search::IndexConfig;
use crate::snapshot::{BuildConfig, Snapshot, SnapshotError};
use crate::taxonomy::{parse_tsv, Taxonomy, TaxonomyError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRecord {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub unit_type: String,
    #[serde(default)]
    pub parent_id: Option<String>,
    /// `OrgUnit` (default) or `Institution`.
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub institution_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResearcherRecord {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub unit_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub id: String,
    pub title: String,
    #[serde(default, rename = "abstract")]
    pub abstract_text: String,
    pub year: i64,
    #[serde(default)]
    pub citations: i64,
    #[serde(default)]
    pub author_ids: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFile {
    Units,
    Researchers,
    Publications,
}

impl InputFile {
    pub fn file_name(self) -> &'static str {
        match self {
            InputFile::Units => "units.ndjson",
            InputFile::Researchers => "researchers.ndjson",
            InputFile::Publications => "publications.ndjson",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code", content = "detail", rename_all = "snake_case")]
pub enum RejectReason {
    Parse(String),
    EmptyId,
    DuplicateId,
    InvalidField(String),
    DanglingReference(String),
    CyclicOrgStructure,
    EmptyTitle,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Parse(m) => write!(f, "parse error: {m}"),
            RejectReason::EmptyId => f.write_str("empty id"),
            RejectReason::DuplicateId => f.write_str("duplicate id"),
            RejectReason::InvalidField(m) => write!(f, "invalid field: {m}"),
            RejectReason::DanglingReference(id) => write!(f, "dangling reference to `{id}`"),
            RejectReason::CyclicOrgStructure => f.write_str("PART_OF cycle"),
            RejectReason::EmptyTitle => f.write_str("empty title"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedRecord {
    pub file: InputFile,
    pub line: usize,
    pub id: Option<String>,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub classifier: ClassifierConfig,
    pub index: IndexConfig,
    pub stopword_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub snapshot_version: u64,
    pub node_counts: BTreeMap<NodeKind, usize>,
    pub edge_counts: BTreeMap<EdgeKind, usize>,
    pub rejected: Vec<RejectedRecord>,
    pub config: ConfigEcho,
}

impl IngestReport {
    pub fn node_count(&self, kind: NodeKind) -> usize {
        self.node_counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn edge_count(&self, kind: EdgeKind) -> usize {
        self.edge_counts.get(&kind).copied().unwrap_or(0)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("taxonomy invalid: {0}")]
    TaxonomyInvalid(TaxonomyError),
    #[error("taxonomy invalid: no concepts")]
    EmptyTaxonomy,
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

/// Raw contents of the four input files.
#[derive(Debug, Clone, Default)]
pub struct CorpusTexts {
    pub taxonomy: String,
    pub units: String,
    pub researchers: String,
    pub publications: String,
}

#[derive(Debug, Clone)]
pub struct CorpusPaths {
    pub taxonomy: PathBuf,
    pub units: PathBuf,
    pub researchers: PathBuf,
    pub publications: PathBuf,
}

impl CorpusPaths {
    /// Conventional file names inside one directory.
    pub fn in_dir(dir: &Path) -> Self {
        CorpusPaths {
            taxonomy: dir.join("taxonomy.tsv"),
            units: dir.join(InputFile::Units.file_name()),
            researchers: dir.join(InputFile::Researchers.file_name()),
            publications: dir.join(InputFile::Publications.file_name()),
        }
    }

    pub fn read(&self) -> Result<CorpusTexts, IngestError> {
        let read = |path: &Path| {
            std::fs::read_to_string(path).map_err(|source| IngestError::FileUnreadable {
                path: path.to_path_buf(),
                source,
            })
        };
        Ok(CorpusTexts {
            taxonomy: read(&self.taxonomy)?,
            units: read(&self.units)?,
            researchers: read(&self.researchers)?,
            publications: read(&self.publications)?,
        })
    }
}

/// Everything an ingest run produces.
#[derive(Debug)]
pub struct IngestOutcome {
    pub snapshot: Snapshot,
    pub report: IngestReport,
    pub classifications: Vec<Classification>,
    /// Rejected input lines per file, verbatim, in input order.
    pub rejects: BTreeMap<InputFile, Vec<String>>,
}

struct Parsed<T> {
    line: usize,
    raw: String,
    record: T,
}

#[derive(Default)]
struct Rejections {
    records: Vec<(RejectedRecord, String)>,
}

impl Rejections {
    fn push(
        &mut self,
        file: InputFile,
        line: usize,
        id: Option<&str>,
        reason: RejectReason,
        raw: &str,
    ) {
        self.records.push((
            RejectedRecord {
                file,
                line,
                id: id.map(str::to_string),
                reason,
            },
            raw.to_string(),
        ));
    }
}

fn parse_lines<T: DeserializeOwned>(
    file: InputFile,
    text: &str,
    rejects: &mut Rejections,
) -> Vec<Parsed<T>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<T>(raw) {
            Ok(record) => out.push(Parsed {
                line: idx + 1,
                raw: raw.to_string(),
                record,
            }),
            Err(e) => rejects.push(file, idx + 1, None, RejectReason::Parse(e.to_string()), raw),
        }
    }
    out
}

trait HasId {
    fn id(&self) -> &str;
}

impl HasId for UnitRecord {
    fn id(&self) -> &str {
        &self.id
    }
}

impl HasId for ResearcherRecord {
    fn id(&self) -> &str {
        &self.id
    }
}

impl HasId for PublicationRecord {
    fn id(&self) -> &str {
        &self.id
    }
}

/// Rejects empty ids, ids already in the graph and ids repeated within
/// the file (every copy), then returns the survivors sorted by id.
fn dedupe<T: HasId>(
    file: InputFile,
    parsed: Vec<Parsed<T>>,
    builder: &GraphBuilder,
    rejects: &mut Rejections,
) -> Vec<Parsed<T>> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for p in &parsed {
        *counts.entry(p.record.id().to_string()).or_insert(0) += 1;
    }
    let mut kept = Vec::new();
    for p in parsed {
        let id = p.record.id();
        if id.is_empty() {
            rejects.push(file, p.line, None, RejectReason::EmptyId, &p.raw);
        } else if counts[id] > 1 || builder.contains(&NodeId::from(id)) {
            rejects.push(file, p.line, Some(id), RejectReason::DuplicateId, &p.raw);
        } else {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| a.record.id().cmp(b.record.id()));
    kept
}

fn add_taxonomy(builder: &mut GraphBuilder, taxonomy: &Taxonomy) {
    for c in taxonomy.concepts() {
        builder
            .add_node(
                NodeKind::FieldOfStudy,
                c.id.clone(),
                props([
                    ("name", c.name.as_str()),
                    ("description", c.description.as_str()),
                ]),
            )
            .expect("taxonomy ids are unique");
    }
    for c in taxonomy.concepts() {
        for p in &c.parents {
            builder
                .add_edge(&c.id, EdgeKind::ChildOf, p, Props::new())
                .expect("taxonomy parents exist");
        }
    }
}

fn unit_kind(rec: &UnitRecord) -> Result<NodeKind, RejectReason> {
    match rec.kind.as_deref() {
        None | Some("OrgUnit") => Ok(NodeKind::OrgUnit),
        Some("Institution") => Ok(NodeKind::Institution),
        Some(other) => Err(RejectReason::InvalidField(format!(
            "unknown unit kind `{other}`"
        ))),
    }
}

fn parent_of(rec: &UnitRecord) -> Option<&str> {
    rec.parent_id.as_deref().filter(|p| !p.is_empty())
}

fn load_units(builder: &mut GraphBuilder, text: &str, rejects: &mut Rejections) {
    let file = InputFile::Units;
    let parsed = parse_lines::<UnitRecord>(file, text, rejects);
    let mut candidates: BTreeMap<String, (Parsed<UnitRecord>, NodeKind)> = BTreeMap::new();
    for p in dedupe(file, parsed, builder, rejects) {
        let rec = &p.record;
        let check = unit_kind(rec).and_then(|kind| {
            if rec.name.trim().is_empty() {
                Err(RejectReason::InvalidField("empty name".into()))
            } else if kind == NodeKind::Institution && parent_of(rec).is_some() {
                Err(RejectReason::InvalidField(
                    "an institution cannot have a parent".into(),
                ))
            } else {
                Ok(kind)
            }
        });
        match check {
            Ok(kind) => {
                candidates.insert(rec.id.clone(), (p, kind));
            }
            Err(reason) => rejects.push(file, p.line, Some(&rec.id), reason, &p.raw),
        }
    }

    // Accept units whose parent chain resolves, to a fixed point.
    let mut accepted: BTreeSet<String> = BTreeSet::new();
    loop {
        let ready: Vec<String> = candidates
            .iter()
            .filter(|(id, (p, _))| {
                !accepted.contains(*id)
                    && parent_of(&p.record).is_none_or(|parent| accepted.contains(parent))
            })
            .map(|(id, _)| id.clone())
            .collect();
        if ready.is_empty() {
            break;
        }
        accepted.extend(ready);
    }

    for (id, (p, _)) in &candidates {
        if accepted.contains(id) {
            continue;
        }
        // A unit on a PART_OF cycle is cyclic; anything else hangs below a
        // missing or rejected unit and references its direct parent.
        let direct = parent_of(&p.record).expect("unresolved unit has a parent");
        let mut seen = BTreeSet::new();
        let mut current = direct;
        let reason = loop {
            if current == id.as_str() {
                break RejectReason::CyclicOrgStructure;
            }
            if !seen.insert(current) {
                break RejectReason::DanglingReference(direct.to_string());
            }
            match candidates.get(current) {
                Some((c, _)) if !accepted.contains(current) => {
                    current = parent_of(&c.record).expect("unresolved unit has a parent")
                }
                _ => break RejectReason::DanglingReference(direct.to_string()),
            }
        };
        rejects.push(file, p.line, Some(id), reason, &p.raw);
    }

    for id in &accepted {
        let (p, kind) = &candidates[id];
        let rec = &p.record;
        let mut node_props = props([("name", rec.name.as_str())]);
        match kind {
            NodeKind::Institution => {
                if let Some(t) = &rec.institution_type {
                    node_props.insert("institution_type".into(), PropValue::from(t.as_str()));
                }
            }
            _ => {
                node_props.insert("unit_type".into(), PropValue::from(rec.unit_type.as_str()));
            }
        }
        builder
            .add_node(*kind, NodeId::from(id.as_str()), node_props)
            .expect("deduplicated id");
    }
    for id in &accepted {
        let rec = &candidates[id].0.record;
        if let Some(parent) = parent_of(rec) {
            builder
                .add_edge(
                    &NodeId::from(id.as_str()),
                    EdgeKind::PartOf,
                    &NodeId::from(parent),
                    Props::new(),
                )
                .expect("parent accepted before child");
        }
    }
}

fn load_researchers(builder: &mut GraphBuilder, text: &str, rejects: &mut Rejections) {
    let file = InputFile::Researchers;
    let parsed = parse_lines::<ResearcherRecord>(file, text, rejects);
    for p in dedupe(file, parsed, builder, rejects) {
        let rec = &p.record;
        let units: BTreeSet<&str> = rec.unit_ids.iter().map(String::as_str).collect();
        let bad_unit = units.iter().find(|u| {
            u.is_empty()
                || builder
                    .node(&NodeId::from(**u))
                    .is_none_or(|n| n.kind != NodeKind::OrgUnit)
        });
        let reason = if rec.name.trim().is_empty() {
            Some(RejectReason::InvalidField("empty name".into()))
        } else {
            bad_unit.map(|u| RejectReason::DanglingReference(u.to_string()))
        };
        if let Some(reason) = reason {
            rejects.push(file, p.line, Some(&rec.id), reason, &p.raw);
            continue;
        }
        let id = builder
            .add_node(
                NodeKind::Researcher,
                NodeId::from(rec.id.as_str()),
                props([("name", rec.name.as_str())]),
            )
            .expect("deduplicated id");
        for u in units {
            builder
                .add_edge(&id, EdgeKind::MemberOf, &NodeId::from(u), Props::new())
                .expect("unit checked");
        }
    }
}

fn load_publications(
    builder: &mut GraphBuilder,
    text: &str,
    rejects: &mut Rejections,
) -> Vec<PublicationText> {
    let file = InputFile::Publications;
    let parsed = parse_lines::<PublicationRecord>(file, text, rejects);
    let mut accepted = Vec::new();
    for p in dedupe(file, parsed, builder, rejects) {
        let rec = &p.record;
        let authors: BTreeSet<&str> = rec.author_ids.iter().map(String::as_str).collect();
        let reason = if rec.title.trim().is_empty() {
            Some(RejectReason::EmptyTitle)
        } else if rec.citations < 0 {
            Some(RejectReason::InvalidField("negative citation count".into()))
        } else {
            authors
                .iter()
                .find(|a| {
                    a.is_empty()
                        || builder
                            .node(&NodeId::from(**a))
                            .is_none_or(|n| n.kind != NodeKind::Researcher)
                })
                .map(|a| RejectReason::DanglingReference(a.to_string()))
        };
        if let Some(reason) = reason {
            rejects.push(file, p.line, Some(&rec.id), reason, &p.raw);
            continue;
        }
        let mut node_props = props([
            ("title", rec.title.as_str()),
            ("abstract", rec.abstract_text.as_str()),
        ]);
        node_props.insert("year".into(), rec.year.into());
        node_props.insert("citations".into(), rec.citations.into());
        let id = builder
            .add_node(
                NodeKind::Publication,
                NodeId::from(rec.id.as_str()),
                node_props,
            )
            .expect("deduplicated id");
        for a in authors {
            builder
                .add_edge(&NodeId::from(a), EdgeKind::Authored, &id, Props::new())
                .expect("author checked");
        }
        accepted.push(PublicationText {
            id,
            title: rec.title.clone(),
            abstract_text: rec.abstract_text.clone(),
        });
    }
    accepted
}

/// Runs the full pipeline over in-memory file contents.
pub fn ingest_texts(
    texts: &CorpusTexts,
    config: &BuildConfig,
    version: u64,
) -> Result<IngestOutcome, IngestError> {
    let taxonomy =
        Taxonomy::load(parse_tsv(&texts.taxonomy).map_err(IngestError::TaxonomyInvalid)?)
            .map_err(IngestError::TaxonomyInvalid)?;
    if taxonomy.is_empty() {
        return Err(IngestError::EmptyTaxonomy);
    }
    let classifier = Classifier::new(&taxonomy, config.tokenizer.clone(), config.classifier)?;

    let mut builder = GraphBuilder::new();
    let mut rejects = Rejections::default();
    add_taxonomy(&mut builder, &taxonomy);
    load_units(&mut builder, &texts.units, &mut rejects);
    load_researchers(&mut builder, &texts.researchers, &mut rejects);
    let publications = load_publications(&mut builder, &texts.publications, &mut rejects);

    let classifications = classifier.classify_all(&publications)?;
    for c in &classifications {
        for tag in &c.tags {
            builder
                .add_edge(
                    &c.publication,
                    EdgeKind::About,
                    &tag.fos,
                    props([("score", tag.score)]),
                )
                .expect("classifier emits valid scores for known concepts");
        }
    }

    let snapshot = Snapshot::assemble(builder.commit(version), config.clone())?;

    rejects
        .records
        .sort_by(|a, b| (a.0.file, a.0.line).cmp(&(b.0.file, b.0.line)));
    let mut raw_rejects: BTreeMap<InputFile, Vec<String>> = BTreeMap::new();
    for (rec, raw) in &rejects.records {
        raw_rejects.entry(rec.file).or_default().push(raw.clone());
    }

    let mut node_counts: BTreeMap<NodeKind, usize> =
        NodeKind::ALL.iter().map(|k| (*k, 0)).collect();
    for n in snapshot.graph.nodes() {
        *node_counts.get_mut(&n.kind).unwrap() += 1;
    }
    let mut edge_counts: BTreeMap<EdgeKind, usize> =
        EdgeKind::ALL.iter().map(|k| (*k, 0)).collect();
    for (key, _) in snapshot.graph.edges() {
        *edge_counts.get_mut(&key.kind).unwrap() += 1;
    }
    let report = IngestReport {
        snapshot_version: version,
        node_counts,
        edge_counts,
        rejected: rejects.records.into_iter().map(|(r, _)| r).collect(),
        config: ConfigEcho {
            classifier: config.classifier,
            index: config.index,
            stopword_count: config.tokenizer.stopwords().count(),
        },
    };
    Ok(IngestOutcome {
        snapshot,
        report,
        classifications,
        rejects: raw_rejects,
    })
}

/// Reads the four input files and runs [`ingest_texts`].
pub fn ingest_corpus(
    paths: &CorpusPaths,
    config: &BuildConfig,
    version: u64,
) -> Result<IngestOutcome, IngestError> {
    ingest_texts(&paths.read()?, config, version)
}

/// Writes rejected lines to `<dir>/<input file name>`, one file per input.
pub fn write_rejects(
    dir: &Path,
    rejects: &BTreeMap<InputFile, Vec<String>>,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (file, lines) in rejects {
        let mut body = lines.join("\n");
        body.push('\n');
        std::fs::write(dir.join(file.file_name()), body)?;
    }
    Ok(())
}
