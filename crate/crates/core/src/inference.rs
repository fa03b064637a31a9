//! Transitive topic inference: publication tags → researchers → org units.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::TopicDistribution;
use crate::graph::{Direction, EdgeKind, Graph, NodeId, NodeKind, PropValue};
use crate::taxonomy::{Taxonomy, TaxonomyError};

#[derive(Debug, Error, PartialEq)]
pub enum InferenceError {
    #[error("org structure below `{0}` contains a PART_OF cycle")]
    CyclicOrgStructure(NodeId),
    #[error("k must be >= 1")]
    InvalidK,
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
}

/// ABOUT scores of `publication`, renormalized.
pub fn publication_distribution(graph: &Graph, publication: &NodeId) -> TopicDistribution {
    graph
        .adjacent(publication, EdgeKind::About, Direction::Out)
        .filter_map(|(fos, props)| {
            props
                .get("score")
                .and_then(PropValue::as_f64)
                .map(|s| (fos.clone(), s))
        })
        .collect()
}

/// Unweighted mean over the researcher's authored publications.
pub fn researcher_distribution(
    graph: &Graph,
    researcher: &NodeId,
    publications: &BTreeMap<NodeId, TopicDistribution>,
) -> TopicDistribution {
    TopicDistribution::mean(
        graph
            .adjacent(researcher, EdgeKind::Authored, Direction::Out)
            .filter_map(|(p, _)| publications.get(p)),
    )
}

/// Units (including `unit`) whose PART_OF chain leads to `unit`.
pub fn units_below(graph: &Graph, unit: &NodeId) -> Result<BTreeSet<NodeId>, InferenceError> {
    // Iterative DFS with an explicit on-path set for cycle detection.
    let mut done: BTreeSet<NodeId> = BTreeSet::new();
    let mut on_path: BTreeSet<NodeId> = BTreeSet::new();
    let mut stack: Vec<(NodeId, bool)> = vec![(unit.clone(), false)];
    while let Some((node, expanded)) = stack.pop() {
        if expanded {
            on_path.remove(&node);
            done.insert(node);
            continue;
        }
        if done.contains(&node) {
            continue;
        }
        if !on_path.insert(node.clone()) {
            return Err(InferenceError::CyclicOrgStructure(unit.clone()));
        }
        stack.push((node.clone(), true));
        for (child, _) in graph.adjacent(&node, EdgeKind::PartOf, Direction::In) {
            if on_path.contains(child) {
                return Err(InferenceError::CyclicOrgStructure(unit.clone()));
            }
            if !done.contains(child) {
                stack.push((child.clone(), false));
            }
        }
    }
    Ok(done)
}

/// Distinct publications authored by members of `unit` or any unit below it.
pub fn unit_publications(graph: &Graph, unit: &NodeId) -> Result<BTreeSet<NodeId>, InferenceError> {
    let mut pubs = BTreeSet::new();
    for u in units_below(graph, unit)? {
        for (member, _) in graph.adjacent(&u, EdgeKind::MemberOf, Direction::In) {
            for (p, _) in graph.adjacent(member, EdgeKind::Authored, Direction::Out) {
                pubs.insert(p.clone());
            }
        }
    }
    Ok(pubs)
}

/// Mean over the distinct publications pooled from the unit's subtree.
pub fn unit_distribution(
    graph: &Graph,
    unit: &NodeId,
    publications: &BTreeMap<NodeId, TopicDistribution>,
) -> Result<TopicDistribution, InferenceError> {
    let pooled = unit_publications(graph, unit)?;
    Ok(TopicDistribution::mean(
        pooled.iter().filter_map(|p| publications.get(p)),
    ))
}

/// Rolls `dist` up to `level` and returns the `k` heaviest concepts.
pub fn top_concepts(
    dist: &TopicDistribution,
    taxonomy: &Taxonomy,
    level: u32,
    k: usize,
) -> Result<Vec<(NodeId, f64)>, InferenceError> {
    if k == 0 {
        return Err(InferenceError::InvalidK);
    }
    taxonomy.check_level(level)?;
    let rolled = taxonomy.rollup_distribution(dist, level);
    let mut ranked: Vec<(NodeId, f64)> = rolled.iter().map(|(id, w)| (id.clone(), w)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    Ok(ranked)
}

/// Cached distributions for every publication, researcher and unit.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Profiles {
    pub publications: BTreeMap<NodeId, TopicDistribution>,
    pub researchers: BTreeMap<NodeId, TopicDistribution>,
    /// OrgUnits and Institutions.
    pub units: BTreeMap<NodeId, TopicDistribution>,
}

impl Profiles {
    pub fn compute(graph: &Graph) -> Result<Self, InferenceError> {
        let publications: BTreeMap<NodeId, TopicDistribution> = graph
            .nodes_of_kind(NodeKind::Publication)
            .map(|n| (n.id.clone(), publication_distribution(graph, &n.id)))
            .collect();

        let researcher_ids: Vec<&NodeId> = graph
            .nodes_of_kind(NodeKind::Researcher)
            .map(|n| &n.id)
            .collect();
        let researchers = researcher_ids
            .par_iter()
            .map(|r| {
                (
                    (*r).clone(),
                    researcher_distribution(graph, r, &publications),
                )
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect();

        let unit_ids: Vec<&NodeId> = graph
            .nodes()
            .filter(|n| matches!(n.kind, NodeKind::OrgUnit | NodeKind::Institution))
            .map(|n| &n.id)
            .collect();
        let units = unit_ids
            .par_iter()
            .map(|u| unit_distribution(graph, u, &publications).map(|d| ((*u).clone(), d)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .collect();

        Ok(Profiles {
            publications,
            researchers,
            units,
        })
    }

    /// Profile of any non-concept node.
    pub fn get(&self, id: &NodeId) -> Option<&TopicDistribution> {
        self.publications
            .get(id)
            .or_else(|| self.researchers.get(id))
            .or_else(|| self.units.get(id))
    }
}
