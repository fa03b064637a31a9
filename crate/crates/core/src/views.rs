//! Read-only projections of a snapshot, shaped for the HTTP API.
//!
//! Every function here is pure over a [`Snapshot`]; the server adds the
//! snapshot version and maps [`ViewError`] onto status codes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{self, AnalyticsError, CitationComparison, OverviewTile, TrendSeries};
use crate::graph::{Direction, EdgeKind, Node, NodeId, NodeKind, PropValue};
use crate::inference::{top_concepts, InferenceError};
use crate::recommend::{self, Reason, RecommendError, Recommendation};
use crate::search::Field;
use crate::snapshot::Snapshot;
use crate::taxonomy::TaxonomyError;

pub const DEFAULT_LIMIT: usize = 25;
pub const MAX_LIMIT: usize = 1000;
pub const TREND_SCORE_DEFINITION: &str =
    "least-squares slope of yearly counts over year index, divided by max(mean count, 1)";

#[derive(Debug, Error, PartialEq)]
pub enum ViewError {
    #[error("{kind} `{id}` not found")]
    NotFound { kind: &'static str, id: String },
    #[error("{0}")]
    BadRequest(String),
}

impl ViewError {
    fn not_found(kind: &'static str, id: &NodeId) -> Self {
        ViewError::NotFound {
            kind,
            id: id.to_string(),
        }
    }
}

impl From<InferenceError> for ViewError {
    fn from(e: InferenceError) -> Self {
        ViewError::BadRequest(e.to_string())
    }
}

impl From<TaxonomyError> for ViewError {
    fn from(e: TaxonomyError) -> Self {
        ViewError::BadRequest(e.to_string())
    }
}

impl From<RecommendError> for ViewError {
    fn from(e: RecommendError) -> Self {
        match e {
            RecommendError::UnknownNode(id) => ViewError::NotFound {
                kind: "node",
                id: id.to_string(),
            },
            RecommendError::UnknownConcept(id) => ViewError::NotFound {
                kind: "field of study",
                id: id.to_string(),
            },
            RecommendError::InvalidK => ViewError::BadRequest(e.to_string()),
        }
    }
}

impl From<AnalyticsError> for ViewError {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::UnknownConcept(id) => ViewError::NotFound {
                kind: "field of study",
                id: id.to_string(),
            },
            other => ViewError::BadRequest(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub limit: usize,
    pub offset: usize,
}

impl Default for Page {
    fn default() -> Self {
        Page {
            limit: DEFAULT_LIMIT,
            offset: 0,
        }
    }
}

impl Page {
    pub fn new(limit: Option<usize>, offset: Option<usize>) -> Result<Self, ViewError> {
        let limit = limit.unwrap_or(DEFAULT_LIMIT);
        if limit == 0 || limit > MAX_LIMIT {
            return Err(ViewError::BadRequest(format!(
                "limit must be between 1 and {MAX_LIMIT}"
            )));
        }
        Ok(Page {
            limit,
            offset: offset.unwrap_or(0),
        })
    }

    fn apply<T>(&self, items: impl IntoIterator<Item = T>) -> Vec<T> {
        items
            .into_iter()
            .skip(self.offset)
            .take(self.limit)
            .collect()
    }
}

/// Every response body: the snapshot version next to the payload fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versioned<T> {
    pub snapshot_version: u64,
    #[serde(flatten)]
    pub data: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
}

/// Error body; the version is absent only when no snapshot is loaded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
    pub snapshot_version: Option<u64>,
}

/// Display label of a node: its name, or title for publications.
pub fn label(node: &Node) -> String {
    node.str_prop("name")
        .or_else(|| node.str_prop("title"))
        .unwrap_or(node.id.as_str())
        .to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRef {
    pub id: NodeId,
    pub kind: NodeKind,
    pub label: String,
}

fn entity_ref(snap: &Snapshot, id: &NodeId) -> EntityRef {
    let node = snap.graph.node(id).expect("referenced node exists");
    EntityRef {
        id: id.clone(),
        kind: node.kind,
        label: label(node),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptSummary {
    pub id: NodeId,
    pub name: String,
    pub level: u32,
}

fn concept_summary(snap: &Snapshot, id: &NodeId) -> ConceptSummary {
    let c = snap.taxonomy.concept(id).expect("concept exists");
    ConceptSummary {
        id: c.id.clone(),
        name: c.name.clone(),
        level: c.level,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedConcept {
    pub id: NodeId,
    pub name: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopConcepts {
    pub level: u32,
    pub concepts: Vec<WeightedConcept>,
}

fn top_concepts_view(
    snap: &Snapshot,
    id: &NodeId,
    level: Option<u32>,
    k: Option<usize>,
) -> Result<TopConcepts, ViewError> {
    let level = level.unwrap_or_else(|| snap.taxonomy.max_level().min(1));
    let dist = snap.profiles.get(id).cloned().unwrap_or_default();
    let concepts = top_concepts(&dist, &snap.taxonomy, level, k.unwrap_or(5))?
        .into_iter()
        .map(|(fos, weight)| WeightedConcept {
            name: snap.taxonomy.concept(&fos).expect("concept").name.clone(),
            id: fos,
            weight,
        })
        .collect();
    Ok(TopConcepts { level, concepts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHitView {
    pub node: NodeId,
    pub kind: NodeKind,
    pub label: String,
    pub score: f64,
    pub matched_fields: Vec<Field>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchView {
    pub query: String,
    pub hits: Vec<SearchHitView>,
}

pub fn search(
    snap: &Snapshot,
    query: &str,
    kinds: Option<&BTreeSet<NodeKind>>,
    page: Page,
) -> SearchView {
    let hits = snap
        .index
        .lookup(query, kinds, page.limit, page.offset)
        .into_iter()
        .map(|h| SearchHitView {
            label: label(snap.graph.node(&h.node).expect("indexed node exists")),
            node: h.node,
            kind: h.kind,
            score: h.score,
            matched_fields: h.matched_fields,
        })
        .collect();
    SearchView {
        query: query.to_string(),
        hits,
    }
}

/// Parses a comma-separated kind list such as `Researcher,Publication`.
pub fn parse_kinds(list: &str) -> Result<Option<BTreeSet<NodeKind>>, ViewError> {
    let kinds: BTreeSet<NodeKind> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|e: crate::graph::GraphError| ViewError::BadRequest(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    Ok(if kinds.is_empty() { None } else { Some(kinds) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    pub concept: ConceptSummary,
    pub tile: OverviewTile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FosRootsView {
    pub roots: Vec<RootEntry>,
}

/// Every root concept with its overview tile, in ascending id order.
pub fn fos_roots(snap: &Snapshot) -> FosRootsView {
    let tiles = analytics::institution_overview(snap);
    let roots = snap
        .taxonomy
        .roots()
        .iter()
        .map(|r| RootEntry {
            concept: concept_summary(snap, r),
            tile: tiles
                .iter()
                .find(|t| t.fos == *r)
                .cloned()
                .unwrap_or(OverviewTile {
                    fos: r.clone(),
                    publication_count: 0,
                    researcher_count: 0,
                    total_citations: 0,
                }),
        })
        .collect();
    FosRootsView { roots }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedPublication {
    pub id: NodeId,
    pub title: String,
    pub year: Option<i64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FosView {
    pub id: NodeId,
    pub name: String,
    pub description: String,
    pub level: u32,
    pub parents: Vec<ConceptSummary>,
    pub children: Vec<ConceptSummary>,
    pub tagged_publication_count: usize,
    /// Directly tagged publications, highest score first.
    pub publications: Vec<TaggedPublication>,
}

fn score_of(props: &crate::graph::Props) -> f64 {
    props
        .get("score")
        .and_then(PropValue::as_f64)
        .unwrap_or(0.0)
}

pub fn fos(snap: &Snapshot, id: &NodeId, page: Page) -> Result<FosView, ViewError> {
    let c = snap
        .taxonomy
        .concept(id)
        .ok_or_else(|| ViewError::not_found("field of study", id))?;
    let mut tagged: Vec<TaggedPublication> = snap
        .graph
        .adjacent(id, EdgeKind::About, Direction::In)
        .map(|(p, props)| {
            let node = snap.graph.node(p).expect("publication");
            TaggedPublication {
                id: p.clone(),
                title: label(node),
                year: analytics::year_of(node),
                score: score_of(props),
            }
        })
        .collect();
    tagged.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
    Ok(FosView {
        id: c.id.clone(),
        name: c.name.clone(),
        description: c.description.clone(),
        level: c.level,
        parents: c.parents.iter().map(|p| concept_summary(snap, p)).collect(),
        children: snap
            .taxonomy
            .children(id)
            .iter()
            .map(|ch| concept_summary(snap, ch))
            .collect(),
        tagged_publication_count: tagged.len(),
        publications: page.apply(tagged),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationSummary {
    pub id: NodeId,
    pub title: String,
    pub year: Option<i64>,
    pub citations: u64,
}

fn publication_summary(snap: &Snapshot, id: &NodeId) -> PublicationSummary {
    let node = snap.graph.node(id).expect("publication");
    PublicationSummary {
        id: id.clone(),
        title: label(node),
        year: analytics::year_of(node),
        citations: analytics::citations_of(node),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResearcherView {
    pub id: NodeId,
    pub name: String,
    pub units: Vec<EntityRef>,
    pub top_concepts: TopConcepts,
    pub publication_count: usize,
    /// Newest first, then by id.
    pub publications: Vec<PublicationSummary>,
}

fn node_of_kind<'a>(
    snap: &'a Snapshot,
    id: &NodeId,
    kinds: &[NodeKind],
    what: &'static str,
) -> Result<&'a Node, ViewError> {
    snap.graph
        .node(id)
        .filter(|n| kinds.contains(&n.kind))
        .ok_or_else(|| ViewError::not_found(what, id))
}

pub fn researcher(
    snap: &Snapshot,
    id: &NodeId,
    level: Option<u32>,
    k: Option<usize>,
    page: Page,
) -> Result<ResearcherView, ViewError> {
    let node = node_of_kind(snap, id, &[NodeKind::Researcher], "researcher")?;
    let mut pubs: Vec<PublicationSummary> = snap
        .graph
        .adjacent(id, EdgeKind::Authored, Direction::Out)
        .map(|(p, _)| publication_summary(snap, p))
        .collect();
    pubs.sort_by(|a, b| b.year.cmp(&a.year).then_with(|| a.id.cmp(&b.id)));
    Ok(ResearcherView {
        id: id.clone(),
        name: label(node),
        units: snap
            .graph
            .adjacent(id, EdgeKind::MemberOf, Direction::Out)
            .map(|(u, _)| entity_ref(snap, u))
            .collect(),
        top_concepts: top_concepts_view(snap, id, level, k)?,
        publication_count: pubs.len(),
        publications: page.apply(pubs),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitView {
    pub id: NodeId,
    pub kind: NodeKind,
    pub name: String,
    /// `unit_type` for org units, `institution_type` for institutions.
    pub unit_type: Option<String>,
    pub parent: Option<EntityRef>,
    pub children: Vec<EntityRef>,
    pub member_count: usize,
    /// Direct members only.
    pub members: Vec<EntityRef>,
    pub top_concepts: TopConcepts,
}

pub fn unit(
    snap: &Snapshot,
    id: &NodeId,
    level: Option<u32>,
    k: Option<usize>,
    page: Page,
) -> Result<UnitView, ViewError> {
    let node = node_of_kind(
        snap,
        id,
        &[NodeKind::OrgUnit, NodeKind::Institution],
        "unit",
    )?;
    let members: Vec<EntityRef> = snap
        .graph
        .adjacent(id, EdgeKind::MemberOf, Direction::In)
        .map(|(r, _)| entity_ref(snap, r))
        .collect();
    Ok(UnitView {
        id: id.clone(),
        kind: node.kind,
        name: label(node),
        unit_type: node
            .str_prop("unit_type")
            .or_else(|| node.str_prop("institution_type"))
            .map(str::to_string),
        parent: snap
            .graph
            .adjacent(id, EdgeKind::PartOf, Direction::Out)
            .map(|(p, _)| entity_ref(snap, p))
            .next(),
        children: snap
            .graph
            .adjacent(id, EdgeKind::PartOf, Direction::In)
            .map(|(c, _)| entity_ref(snap, c))
            .collect(),
        member_count: members.len(),
        members: page.apply(members),
        top_concepts: top_concepts_view(snap, id, level, k)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationTag {
    pub fos: NodeId,
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationView {
    pub id: NodeId,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub year: Option<i64>,
    pub citations: u64,
    pub tags: Vec<PublicationTag>,
    pub authors: Vec<EntityRef>,
}

pub fn publication(snap: &Snapshot, id: &NodeId) -> Result<PublicationView, ViewError> {
    let node = node_of_kind(snap, id, &[NodeKind::Publication], "publication")?;
    let mut tags: Vec<PublicationTag> = snap
        .graph
        .adjacent(id, EdgeKind::About, Direction::Out)
        .map(|(f, props)| PublicationTag {
            fos: f.clone(),
            name: snap.taxonomy.concept(f).expect("concept").name.clone(),
            score: score_of(props),
        })
        .collect();
    tags.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.fos.cmp(&b.fos)));
    Ok(PublicationView {
        id: id.clone(),
        title: label(node),
        abstract_text: node.str_prop("abstract").unwrap_or("").to_string(),
        year: analytics::year_of(node),
        citations: analytics::citations_of(node),
        tags,
        authors: snap
            .graph
            .adjacent(id, EdgeKind::Authored, Direction::In)
            .map(|(a, _)| entity_ref(snap, a))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationView {
    pub target: NodeId,
    pub kind: NodeKind,
    pub label: String,
    pub score: f64,
    pub reason: Reason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationsView {
    pub source: NodeId,
    pub recommendations: Vec<RecommendationView>,
}

fn recommendations_view(
    snap: &Snapshot,
    source: &NodeId,
    recs: Vec<Recommendation>,
) -> RecommendationsView {
    RecommendationsView {
        source: source.clone(),
        recommendations: recs
            .into_iter()
            .map(|r| {
                let node = snap.graph.node(&r.target).expect("recommended node");
                RecommendationView {
                    kind: node.kind,
                    label: label(node),
                    target: r.target,
                    score: r.score,
                    reason: r.reason,
                }
            })
            .collect(),
    }
}

/// Related entities for `id`, which must be of one of `kinds`.
pub fn related(
    snap: &Snapshot,
    id: &NodeId,
    kinds: &[NodeKind],
    what: &'static str,
    k: Option<usize>,
) -> Result<RecommendationsView, ViewError> {
    node_of_kind(snap, id, kinds, what)?;
    let recs = recommend::related_content(snap, id, k.unwrap_or(5))?;
    Ok(recommendations_view(snap, id, recs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedSeries {
    pub fos: NodeId,
    pub name: String,
    pub level: u32,
    /// Every year of the window, zero-filled.
    pub counts: BTreeMap<i64, f64>,
    pub trend_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendsView {
    pub level: u32,
    pub from: i64,
    pub to: i64,
    pub trend_score_definition: String,
    pub series: Vec<NamedSeries>,
}

/// Trend series; a missing bound defaults to the `window` most recent years.
pub fn trends(
    snap: &Snapshot,
    level: u32,
    from: Option<i64>,
    to: Option<i64>,
    window: i64,
) -> Result<TrendsView, ViewError> {
    snap.taxonomy.check_level(level)?;
    let (def_from, def_to) = analytics::default_window(snap, window).unwrap_or((0, window - 1));
    let to = to.unwrap_or(def_to);
    let from = from.unwrap_or_else(|| {
        if to == def_to {
            def_from
        } else {
            to - window + 1
        }
    });
    let series = analytics::trend_series(snap, level, from, to)?
        .into_iter()
        .map(|s: TrendSeries| NamedSeries {
            name: snap.taxonomy.concept(&s.fos).expect("concept").name.clone(),
            fos: s.fos,
            level: s.level,
            counts: s.counts,
            trend_score: s.trend_score,
        })
        .collect();
    Ok(TrendsView {
        level,
        from,
        to,
        trend_score_definition: TREND_SCORE_DEFINITION.to_string(),
        series,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationRow {
    pub name: String,
    #[serde(flatten)]
    pub comparison: CitationComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationsView {
    pub fields: Vec<CitationRow>,
}

pub fn compare_citations(snap: &Snapshot, ids: &[NodeId]) -> Result<CitationsView, ViewError> {
    let rows = analytics::compare_citations(snap, ids)?
        .into_iter()
        .map(|c| CitationRow {
            name: snap.taxonomy.concept(&c.fos).expect("concept").name.clone(),
            comparison: c,
        })
        .collect();
    Ok(CitationsView { fields: rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileView {
    pub name: String,
    #[serde(flatten)]
    pub tile: OverviewTile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverviewView {
    pub tiles: Vec<TileView>,
}

pub fn overview(snap: &Snapshot) -> OverviewView {
    OverviewView {
        tiles: analytics::institution_overview(snap)
            .into_iter()
            .map(|t| TileView {
                name: snap.taxonomy.concept(&t.fos).expect("root").name.clone(),
                tile: t,
            })
            .collect(),
    }
}
