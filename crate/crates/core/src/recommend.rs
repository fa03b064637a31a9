//! Similarity-based recommendations of related entities.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::TopicDistribution;
use crate::graph::{Direction, EdgeKind, NodeId, NodeKind};
use crate::snapshot::Snapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    TopicSimilarity,
    TaxonomySibling,
    CoOccurrence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub target: NodeId,
    pub score: f64,
    pub reason: Reason,
}

#[derive(Debug, Error, PartialEq)]
pub enum RecommendError {
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("unknown concept `{0}`")]
    UnknownConcept(NodeId),
    #[error("k must be >= 1")]
    InvalidK,
}

fn rank(mut recs: Vec<Recommendation>, k: usize) -> Vec<Recommendation> {
    recs.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.target.cmp(&b.target))
    });
    recs.truncate(k);
    recs
}

fn check_k(k: usize) -> Result<(), RecommendError> {
    if k == 0 {
        Err(RecommendError::InvalidK)
    } else {
        Ok(())
    }
}

/// Ranks candidates by cosine against `query`; empty query yields nothing.
fn rank_by_profile<'a, I>(
    query_id: &NodeId,
    query: &TopicDistribution,
    candidates: I,
    k: usize,
) -> Vec<Recommendation>
where
    I: IntoIterator<Item = (&'a NodeId, &'a TopicDistribution)>,
{
    if query.is_empty() {
        return Vec::new();
    }
    let recs = candidates
        .into_iter()
        .filter(|(id, d)| *id != query_id && !d.is_empty())
        .map(|(id, d)| Recommendation {
            target: id.clone(),
            score: query.cosine(d),
            reason: Reason::TopicSimilarity,
        })
        .collect();
    rank(recs, k)
}

pub fn similar_researchers(
    snap: &Snapshot,
    researcher: &NodeId,
    k: usize,
) -> Result<Vec<Recommendation>, RecommendError> {
    check_k(k)?;
    let query = snap
        .profiles
        .researchers
        .get(researcher)
        .ok_or_else(|| RecommendError::UnknownNode(researcher.clone()))?;
    Ok(rank_by_profile(
        researcher,
        query,
        &snap.profiles.researchers,
        k,
    ))
}

/// Publications carrying a direct ABOUT tag to `fos`.
pub fn tagged_publications(snap: &Snapshot, fos: &NodeId) -> BTreeSet<NodeId> {
    snap.graph
        .adjacent(fos, EdgeKind::About, Direction::In)
        .map(|(p, _)| p.clone())
        .collect()
}

pub fn jaccard(a: &BTreeSet<NodeId>, b: &BTreeSet<NodeId>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Concepts ranked by Jaccard overlap of tagged publications. Sharing a
/// parent is reported as the reason but does not change the score.
pub fn related_fos(
    snap: &Snapshot,
    fos: &NodeId,
    k: usize,
) -> Result<Vec<Recommendation>, RecommendError> {
    check_k(k)?;
    let concept = snap
        .taxonomy
        .concept(fos)
        .ok_or_else(|| RecommendError::UnknownConcept(fos.clone()))?;
    let pubs = tagged_publications(snap, fos);
    if pubs.is_empty() {
        return Ok(Vec::new());
    }
    let recs = snap
        .taxonomy
        .concepts()
        .filter(|g| g.id != *fos)
        .map(|g| {
            let sibling = !g.parents.is_disjoint(&concept.parents);
            Recommendation {
                target: g.id.clone(),
                score: jaccard(&pubs, &tagged_publications(snap, &g.id)),
                reason: if sibling {
                    Reason::TaxonomySibling
                } else {
                    Reason::CoOccurrence
                },
            }
        })
        .collect();
    Ok(rank(recs, k))
}

/// Kind-dispatched recommendations for any node.
pub fn related_content(
    snap: &Snapshot,
    node: &NodeId,
    k: usize,
) -> Result<Vec<Recommendation>, RecommendError> {
    check_k(k)?;
    let kind = snap
        .graph
        .kind_of(node)
        .ok_or_else(|| RecommendError::UnknownNode(node.clone()))?;
    match kind {
        NodeKind::Researcher => similar_researchers(snap, node, k),
        NodeKind::FieldOfStudy => related_fos(snap, node, k),
        NodeKind::Publication => {
            let query = &snap.profiles.publications[node];
            Ok(rank_by_profile(node, query, &snap.profiles.publications, k))
        }
        NodeKind::OrgUnit | NodeKind::Institution => {
            let query = &snap.profiles.units[node];
            let peers = snap
                .profiles
                .units
                .iter()
                .filter(|(id, _)| snap.graph.kind_of(id) == Some(kind));
            Ok(rank_by_profile(node, query, peers, k))
        }
    }
}
