//! Field-of-study hierarchy: a rooted DAG with per-concept depth levels.
//!
//! A concept without parents is a root at level 0. Any other concept sits
//! at `1 + min(parent levels)`, i.e. its shortest distance from a root.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::TopicDistribution;
use crate::graph::{Direction, EdgeKind, Graph, NodeId, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyRecord {
    pub id: NodeId,
    pub name: String,
    pub description: String,
    pub parents: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldOfStudy {
    pub id: NodeId,
    pub name: String,
    pub description: String,
    pub parents: BTreeSet<NodeId>,
    pub level: u32,
}

#[derive(Debug, Error, PartialEq)]
pub enum TaxonomyError {
    #[error("taxonomy contains a cycle: {}", display_cycle(.0))]
    CycleDetected(Vec<NodeId>),
    #[error("concept `{child}` references unknown parent `{parent}`")]
    DanglingParent { child: NodeId, parent: NodeId },
    #[error("duplicate concept id `{0}`")]
    DuplicateId(NodeId),
    #[error("concept `{0}` has an empty name")]
    EmptyName(NodeId),
    #[error("taxonomy line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown concept `{0}`")]
    UnknownConcept(NodeId),
    #[error("level {level} out of range (max {max})")]
    LevelOutOfRange { level: u32, max: u32 },
}

fn display_cycle(ids: &[NodeId]) -> String {
    ids.iter()
        .map(NodeId::as_str)
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// Result of projecting a distribution onto one taxonomy level.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollup {
    /// Renormalized projected distribution.
    pub distribution: TopicDistribution,
    /// Projected mass before renormalization.
    pub mass: BTreeMap<NodeId, f64>,
    /// Input concepts shallower than the target level or unknown.
    pub dropped: Vec<NodeId>,
}

impl Rollup {
    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Taxonomy {
    concepts: BTreeMap<NodeId, FieldOfStudy>,
    children: BTreeMap<NodeId, Vec<NodeId>>,
    roots: Vec<NodeId>,
    max_level: u32,
}

impl Taxonomy {
    /// Validates records and computes levels. Record order does not matter.
    pub fn load(records: Vec<TaxonomyRecord>) -> Result<Self, TaxonomyError> {
        let mut concepts: BTreeMap<NodeId, FieldOfStudy> = BTreeMap::new();
        for rec in records {
            if rec.name.trim().is_empty() {
                return Err(TaxonomyError::EmptyName(rec.id));
            }
            if concepts.contains_key(&rec.id) {
                return Err(TaxonomyError::DuplicateId(rec.id));
            }
            concepts.insert(
                rec.id.clone(),
                FieldOfStudy {
                    id: rec.id,
                    name: rec.name,
                    description: rec.description,
                    parents: rec.parents.into_iter().collect(),
                    level: 0,
                },
            );
        }

        let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for c in concepts.values() {
            for p in &c.parents {
                if !concepts.contains_key(p) {
                    return Err(TaxonomyError::DanglingParent {
                        child: c.id.clone(),
                        parent: p.clone(),
                    });
                }
                children.entry(p.clone()).or_default().push(c.id.clone());
            }
        }
        // Values were pushed while iterating concepts in id order.

        let roots: Vec<NodeId> = concepts
            .values()
            .filter(|c| c.parents.is_empty())
            .map(|c| c.id.clone())
            .collect();

        // Kahn's algorithm from the roots down; anything left over is on or
        // below a cycle.
        let mut pending: BTreeMap<&NodeId, usize> = concepts
            .values()
            .map(|c| (&c.id, c.parents.len()))
            .collect();
        let mut queue: VecDeque<&NodeId> = roots.iter().collect();
        let mut visited = 0usize;
        while let Some(id) = queue.pop_front() {
            visited += 1;
            for child in children.get(id).into_iter().flatten() {
                let left = pending.get_mut(child).expect("child is a concept");
                *left -= 1;
                if *left == 0 {
                    queue.push_back(child);
                }
            }
        }
        if visited < concepts.len() {
            return Err(TaxonomyError::CycleDetected(find_cycle(
                &concepts, &pending,
            )));
        }

        // Multi-source BFS gives the shortest distance from any root.
        let mut levels: BTreeMap<NodeId, u32> = BTreeMap::new();
        let mut queue: VecDeque<NodeId> = VecDeque::new();
        for r in &roots {
            levels.insert(r.clone(), 0);
            queue.push_back(r.clone());
        }
        while let Some(id) = queue.pop_front() {
            let next = levels[&id] + 1;
            for child in children.get(&id).into_iter().flatten() {
                if !levels.contains_key(child) {
                    levels.insert(child.clone(), next);
                    queue.push_back(child.clone());
                }
            }
        }
        let mut max_level = 0;
        for c in concepts.values_mut() {
            c.level = levels[&c.id];
            max_level = max_level.max(c.level);
        }

        Ok(Taxonomy {
            concepts,
            children,
            roots,
            max_level,
        })
    }

    /// Reconstructs the taxonomy from FieldOfStudy nodes and CHILD_OF edges.
    pub fn from_graph(graph: &Graph) -> Result<Self, TaxonomyError> {
        let records = graph
            .nodes_of_kind(NodeKind::FieldOfStudy)
            .map(|n| TaxonomyRecord {
                id: n.id.clone(),
                name: n.str_prop("name").unwrap_or_default().to_string(),
                description: n.str_prop("description").unwrap_or_default().to_string(),
                parents: graph
                    .adjacent(&n.id, EdgeKind::ChildOf, Direction::Out)
                    .map(|(p, _)| p.clone())
                    .collect(),
            })
            .collect();
        Self::load(records)
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// Level-0 concepts in ascending id order.
    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn concept(&self, id: &NodeId) -> Option<&FieldOfStudy> {
        self.concepts.get(id)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.concepts.contains_key(id)
    }

    pub fn level(&self, id: &NodeId) -> Option<u32> {
        self.concepts.get(id).map(|c| c.level)
    }

    /// Direct children in ascending id order.
    pub fn children(&self, id: &NodeId) -> &[NodeId] {
        self.children.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All concepts in ascending id order.
    pub fn concepts(&self) -> impl Iterator<Item = &FieldOfStudy> {
        self.concepts.values()
    }

    pub fn concepts_at_level(&self, level: u32) -> impl Iterator<Item = &FieldOfStudy> {
        self.concepts.values().filter(move |c| c.level == level)
    }

    pub fn check_level(&self, level: u32) -> Result<(), TaxonomyError> {
        if level > self.max_level {
            return Err(TaxonomyError::LevelOutOfRange {
                level,
                max: self.max_level,
            });
        }
        Ok(())
    }

    /// Concepts at `level` reached from `fos` by following parent links.
    ///
    /// The walk stops at the first concept whose level is at or below
    /// `level`, so the result for `level(fos)` is exactly `{fos}`.
    pub fn ancestors_at_level(
        &self,
        fos: &NodeId,
        level: u32,
    ) -> Result<BTreeSet<NodeId>, TaxonomyError> {
        let start = self
            .concepts
            .get(fos)
            .ok_or_else(|| TaxonomyError::UnknownConcept(fos.clone()))?;
        if level > start.level {
            return Err(TaxonomyError::LevelOutOfRange {
                level,
                max: start.level,
            });
        }
        let mut found = BTreeSet::new();
        let mut seen: BTreeSet<&NodeId> = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            if !seen.insert(&c.id) {
                continue;
            }
            if c.level == level {
                found.insert(c.id.clone());
            } else if c.level > level {
                stack.extend(c.parents.iter().map(|p| &self.concepts[p]));
            }
        }
        Ok(found)
    }

    /// Projects `dist` onto concepts at `level`, splitting each entry's
    /// weight equally among its ancestors at that level.
    pub fn rollup(&self, dist: &TopicDistribution, level: u32) -> Rollup {
        let mut mass: BTreeMap<NodeId, f64> = BTreeMap::new();
        let mut dropped = Vec::new();
        for (fos, w) in dist.iter() {
            match self.ancestors_at_level(fos, level) {
                Ok(ancestors) => {
                    let share = w / ancestors.len() as f64;
                    for a in ancestors {
                        *mass.entry(a).or_insert(0.0) += share;
                    }
                }
                Err(_) => dropped.push(fos.clone()),
            }
        }
        Rollup {
            distribution: TopicDistribution::normalized(mass.clone()),
            mass,
            dropped,
        }
    }

    pub fn rollup_distribution(&self, dist: &TopicDistribution, level: u32) -> TopicDistribution {
        self.rollup(dist, level).distribution
    }
}

/// Walks unresolved parents until a concept repeats. Every unresolved
/// concept has at least one unresolved parent, so the walk must loop.
fn find_cycle(
    concepts: &BTreeMap<NodeId, FieldOfStudy>,
    pending: &BTreeMap<&NodeId, usize>,
) -> Vec<NodeId> {
    let unresolved = |id: &NodeId| pending.get(id).copied().unwrap_or(0) > 0;
    let mut current = concepts
        .keys()
        .find(|id| unresolved(id))
        .expect("at least one unresolved concept");
    let mut path: Vec<&NodeId> = Vec::new();
    loop {
        if let Some(pos) = path.iter().position(|id| *id == current) {
            let mut cycle: Vec<NodeId> = path[pos..].iter().map(|id| (*id).clone()).collect();
            cycle.push(current.clone());
            return cycle;
        }
        path.push(current);
        current = concepts[current]
            .parents
            .iter()
            .find(|p| unresolved(p))
            .expect("unresolved concept has an unresolved parent");
    }
}

/// Parses `id<TAB>name<TAB>description<TAB>parent1,parent2,...` lines.
/// Blank lines and lines starting with `#` are skipped; the parents
/// column may be omitted for roots.
pub fn parse_tsv(text: &str) -> Result<Vec<TaxonomyRecord>, TaxonomyError> {
    let mut records = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(TaxonomyError::Parse {
                line,
                message: format!("expected 3 or 4 tab-separated fields, got {}", fields.len()),
            });
        }
        let id = NodeId::new(fields[0].trim()).map_err(|_| TaxonomyError::Parse {
            line,
            message: "empty id".into(),
        })?;
        let parents = match fields.get(3) {
            Some(list) => list
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(NodeId::from)
                .collect(),
            None => Vec::new(),
        };
        records.push(TaxonomyRecord {
            id,
            name: fields[1].trim().to_string(),
            description: fields[2].trim().to_string(),
            parents,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, parents: &[&str]) -> TaxonomyRecord {
        TaxonomyRecord {
            id: id.into(),
            name: id.to_uppercase(),
            description: String::new(),
            parents: parents.iter().map(|p| NodeId::from(*p)).collect(),
        }
    }

    pub(crate) fn diamond() -> Taxonomy {
        Taxonomy::load(vec![
            rec("r", &[]),
            rec("a", &["r"]),
            rec("b", &["r"]),
            rec("c", &["a", "b"]),
        ])
        .unwrap()
    }

    fn set(ids: &[&str]) -> BTreeSet<NodeId> {
        ids.iter().map(|s| NodeId::from(*s)).collect()
    }

    fn dist(pairs: &[(&str, f64)]) -> TopicDistribution {
        pairs.iter().map(|(k, w)| (NodeId::from(*k), *w)).collect()
    }

    #[test]
    fn two_level_chain() {
        let t = Taxonomy::load(vec![
            TaxonomyRecord {
                id: "f0".into(),
                name: "Science".into(),
                description: String::new(),
                parents: vec![],
            },
            TaxonomyRecord {
                id: "f1".into(),
                name: "CS".into(),
                description: String::new(),
                parents: vec!["f0".into()],
            },
        ])
        .unwrap();
        assert_eq!(t.level(&"f0".into()), Some(0));
        assert_eq!(t.level(&"f1".into()), Some(1));
        assert_eq!(t.roots(), &[NodeId::from("f0")]);
    }

    #[test]
    fn two_cycle_detected() {
        let err = Taxonomy::load(vec![rec("a", &["b"]), rec("b", &["a"])]).unwrap_err();
        match err {
            TaxonomyError::CycleDetected(c) => {
                assert_eq!(c.first(), c.last());
                assert_eq!(c.len(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cycle_below_a_root_detected() {
        let err = Taxonomy::load(vec![
            rec("r", &[]),
            rec("a", &["r", "c"]),
            rec("b", &["a"]),
            rec("c", &["b"]),
        ])
        .unwrap_err();
        assert!(matches!(err, TaxonomyError::CycleDetected(_)));
        let err = Taxonomy::load(vec![rec("s", &["s"])]).unwrap_err();
        assert_eq!(
            err,
            TaxonomyError::CycleDetected(vec!["s".into(), "s".into()])
        );
    }

    #[test]
    fn dangling_and_duplicate() {
        assert!(matches!(
            Taxonomy::load(vec![rec("a", &["zz"])]),
            Err(TaxonomyError::DanglingParent { .. })
        ));
        assert_eq!(
            Taxonomy::load(vec![rec("a", &[]), rec("a", &[])]),
            Err(TaxonomyError::DuplicateId("a".into()))
        );
    }

    #[test]
    fn diamond_levels() {
        let t = diamond();
        assert_eq!(t.level(&"c".into()), Some(2));
        assert_eq!(t.max_level(), 2);
        assert_eq!(
            t.children(&"r".into()),
            &[NodeId::from("a"), NodeId::from("b")]
        );
    }

    #[test]
    fn level_uses_shallowest_parent() {
        let t = Taxonomy::load(vec![
            rec("r", &[]),
            rec("a", &["r"]),
            rec("b", &["a"]),
            rec("c", &["r", "b"]),
        ])
        .unwrap();
        assert_eq!(t.level(&"c".into()), Some(1));
    }

    #[test]
    fn diamond_ancestors() {
        let t = diamond();
        assert_eq!(t.ancestors_at_level(&"c".into(), 0).unwrap(), set(&["r"]));
        assert_eq!(
            t.ancestors_at_level(&"c".into(), 1).unwrap(),
            set(&["a", "b"])
        );
        assert_eq!(t.ancestors_at_level(&"r".into(), 0).unwrap(), set(&["r"]));
        assert!(matches!(
            t.ancestors_at_level(&"a".into(), 2),
            Err(TaxonomyError::LevelOutOfRange { .. })
        ));
        assert!(matches!(
            t.ancestors_at_level(&"q".into(), 0),
            Err(TaxonomyError::UnknownConcept(_))
        ));
    }

    #[test]
    fn diamond_rollups() {
        let t = diamond();
        assert_eq!(
            t.rollup_distribution(&dist(&[("c", 1.0)]), 1),
            dist(&[("a", 0.5), ("b", 0.5)])
        );
        assert_eq!(
            t.rollup_distribution(&dist(&[("a", 0.6), ("b", 0.4)]), 1),
            dist(&[("a", 0.6), ("b", 0.4)])
        );
        assert_eq!(
            t.rollup_distribution(&dist(&[("c", 0.5), ("a", 0.5)]), 0),
            dist(&[("r", 1.0)])
        );
        assert!(t
            .rollup_distribution(&TopicDistribution::empty(), 0)
            .is_empty());
    }

    #[test]
    fn shallow_concepts_dropped() {
        let t = diamond();
        let r = t.rollup(&dist(&[("r", 0.5), ("c", 0.5)]), 1);
        assert_eq!(r.dropped, vec![NodeId::from("r")]);
        assert_eq!(r.total_mass(), 0.5);
        assert_eq!(r.distribution, dist(&[("a", 0.5), ("b", 0.5)]));
    }

    #[test]
    fn tsv_parsing() {
        let text = "# comment\nf0\tScience\t\t\nf1\tCS\tComputing\tf0\n\nf2\tAI\t\tf1, f0\r\nf3\tRoot two\tno parents column\n";
        let recs = parse_tsv(text).unwrap();
        assert_eq!(recs.len(), 4);
        assert_eq!(
            recs[2].parents,
            vec![NodeId::from("f1"), NodeId::from("f0")]
        );
        assert!(recs[3].parents.is_empty());
        assert!(matches!(
            parse_tsv("only\tone"),
            Err(TaxonomyError::Parse { line: 1, .. })
        ));
    }
}
