//! Typed property-graph store for the institution ontology.
//!
//! Nodes are one of five kinds and edges are restricted to the endpoint
//! kinds declared by [`EdgeKind::endpoints`]. A [`GraphBuilder`] collects
//! checked insertions; [`GraphBuilder::commit`] freezes them into an
//! immutable, versioned [`Graph`]. [`GraphSnapshot`] is the flat record
//! form used for persistence and for [`validate_schema`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque node identifier, unique across all node kinds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(value: impl Into<String>) -> Result<Self, GraphError> {
        let value = value.into();
        if value.is_empty() {
            return Err(GraphError::EmptyId);
        }
        Ok(NodeId(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    /// Panics on an empty string; use [`NodeId::new`] for untrusted input.
    fn from(value: &str) -> Self {
        NodeId::new(value).expect("node id must be non-empty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Institution,
    OrgUnit,
    Researcher,
    Publication,
    FieldOfStudy,
}

impl NodeKind {
    pub const ALL: [NodeKind; 5] = [
        NodeKind::Institution,
        NodeKind::OrgUnit,
        NodeKind::Researcher,
        NodeKind::Publication,
        NodeKind::FieldOfStudy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Institution => "Institution",
            NodeKind::OrgUnit => "OrgUnit",
            NodeKind::Researcher => "Researcher",
            NodeKind::Publication => "Publication",
            NodeKind::FieldOfStudy => "FieldOfStudy",
        }
    }

    /// Property keys a node of this kind may carry.
    pub fn allowed_properties(self) -> &'static [&'static str] {
        match self {
            NodeKind::Institution => &["name", "institution_type"],
            NodeKind::OrgUnit => &["name", "unit_type"],
            NodeKind::Researcher => &["name"],
            NodeKind::Publication => &["title", "abstract", "year", "citations"],
            NodeKind::FieldOfStudy => &["name", "description"],
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NodeKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| GraphError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    #[serde(rename = "PART_OF")]
    PartOf,
    #[serde(rename = "MEMBER_OF")]
    MemberOf,
    #[serde(rename = "AUTHORED")]
    Authored,
    #[serde(rename = "ABOUT")]
    About,
    #[serde(rename = "CHILD_OF")]
    ChildOf,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 5] = [
        EdgeKind::PartOf,
        EdgeKind::MemberOf,
        EdgeKind::Authored,
        EdgeKind::About,
        EdgeKind::ChildOf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::PartOf => "PART_OF",
            EdgeKind::MemberOf => "MEMBER_OF",
            EdgeKind::Authored => "AUTHORED",
            EdgeKind::About => "ABOUT",
            EdgeKind::ChildOf => "CHILD_OF",
        }
    }

    /// Allowed (source kinds, destination kinds).
    pub fn endpoints(self) -> (&'static [NodeKind], &'static [NodeKind]) {
        use NodeKind::*;
        match self {
            EdgeKind::PartOf => (&[OrgUnit], &[OrgUnit, Institution]),
            EdgeKind::MemberOf => (&[Researcher], &[OrgUnit]),
            EdgeKind::Authored => (&[Researcher], &[Publication]),
            EdgeKind::About => (&[Publication], &[FieldOfStudy]),
            EdgeKind::ChildOf => (&[FieldOfStudy], &[FieldOfStudy]),
        }
    }

    pub fn accepts(self, src: NodeKind, dst: NodeKind) -> bool {
        let (srcs, dsts) = self.endpoints();
        srcs.contains(&src) && dsts.contains(&dst)
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

/// Property value. Restricted to types that persist exactly as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropValue {
    Str(String),
    Int(i64),
    Float(f64),
    List(Vec<String>),
}

impl PropValue {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            PropValue::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            PropValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            PropValue::Float(v) => Some(*v),
            PropValue::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl From<&str> for PropValue {
    fn from(v: &str) -> Self {
        PropValue::Str(v.to_string())
    }
}

impl From<String> for PropValue {
    fn from(v: String) -> Self {
        PropValue::Str(v)
    }
}

impl From<i64> for PropValue {
    fn from(v: i64) -> Self {
        PropValue::Int(v)
    }
}

impl From<f64> for PropValue {
    fn from(v: f64) -> Self {
        PropValue::Float(v)
    }
}

pub type Props = BTreeMap<String, PropValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub props: Props,
}

impl Node {
    pub fn str_prop(&self, key: &str) -> Option<&str> {
        self.props.get(key).and_then(PropValue::as_str)
    }

    pub fn int_prop(&self, key: &str) -> Option<i64> {
        self.props.get(key).and_then(PropValue::as_i64)
    }
}

/// Identity of a stored edge. At most one edge exists per key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    pub src: NodeId,
    pub kind: EdgeKind,
    pub dst: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: NodeId,
    pub kind: EdgeKind,
    pub dst: NodeId,
    pub props: Props,
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("node id must be non-empty")]
    EmptyId,
    #[error("unknown node kind `{0}`")]
    UnknownKind(String),
    #[error("duplicate node id `{0}`")]
    DuplicateId(NodeId),
    #[error("property `{key}` is not allowed on {kind} nodes")]
    UnknownPropertyKey { kind: NodeKind, key: String },
    #[error("property `{key}` is not allowed on {kind} edges")]
    UnexpectedEdgeProperty { kind: EdgeKind, key: String },
    #[error("non-finite float in property `{0}`")]
    NonFiniteProperty(String),
    #[error("edge endpoint `{0}` does not exist")]
    MissingEndpoint(NodeId),
    #[error("{kind} edge cannot connect {src_kind} to {dst_kind}")]
    SchemaViolation {
        kind: EdgeKind,
        src_kind: NodeKind,
        dst_kind: NodeKind,
    },
    #[error("ABOUT score must be a number in (0, 1], got {0:?}")]
    InvalidScore(Option<f64>),
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(EdgeKey),
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("snapshot failed schema validation: {0:?}")]
    Invalid(Vec<Violation>),
}

/// One schema problem found by [`validate_schema`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Violation {
    ReferentialIntegrity {
        edge: EdgeKey,
        missing: NodeId,
    },
    SchemaViolation {
        edge: EdgeKey,
        src_kind: NodeKind,
        dst_kind: NodeKind,
    },
    InvalidScore {
        edge: EdgeKey,
    },
    UnexpectedEdgeProperty {
        edge: EdgeKey,
        key: String,
    },
    UnknownPropertyKey {
        node: NodeId,
        key: String,
    },
    DuplicateNode {
        node: NodeId,
    },
    DuplicateEdge {
        edge: EdgeKey,
    },
}

/// Flat record form of a graph, as persisted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphSnapshot {
    pub nodes: Vec<Node>,
    pub edges: Vec<EdgeRecord>,
    pub version: u64,
}

fn check_node_props(kind: NodeKind, props: &Props) -> Result<(), GraphError> {
    let allowed = kind.allowed_properties();
    for (key, value) in props {
        if !allowed.contains(&key.as_str()) {
            return Err(GraphError::UnknownPropertyKey {
                kind,
                key: key.clone(),
            });
        }
        if let PropValue::Float(v) = value {
            if !v.is_finite() {
                return Err(GraphError::NonFiniteProperty(key.clone()));
            }
        }
    }
    Ok(())
}

fn about_score(props: &Props) -> Option<f64> {
    props.get("score").and_then(PropValue::as_f64)
}

fn valid_score(score: Option<f64>) -> bool {
    matches!(score, Some(s) if s > 0.0 && s <= 1.0)
}

fn check_edge_props(kind: EdgeKind, props: &Props) -> Result<(), GraphError> {
    if kind == EdgeKind::About {
        if let Some(key) = props.keys().find(|k| k.as_str() != "score") {
            return Err(GraphError::UnexpectedEdgeProperty {
                kind,
                key: key.clone(),
            });
        }
        let score = about_score(props);
        if !valid_score(score) {
            return Err(GraphError::InvalidScore(score));
        }
    } else if let Some(key) = props.keys().next() {
        return Err(GraphError::UnexpectedEdgeProperty {
            kind,
            key: key.clone(),
        });
    }
    Ok(())
}

type Adjacency = BTreeMap<(NodeId, EdgeKind), BTreeMap<NodeId, Props>>;

/// Mutable staging area for the next graph version.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: BTreeMap<NodeId, Node>,
    out: Adjacency,
    inc: Adjacency,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(
        &mut self,
        kind: NodeKind,
        id: NodeId,
        props: Props,
    ) -> Result<NodeId, GraphError> {
        if self.nodes.contains_key(&id) {
            return Err(GraphError::DuplicateId(id));
        }
        check_node_props(kind, &props)?;
        self.nodes.insert(
            id.clone(),
            Node {
                id: id.clone(),
                kind,
                props,
            },
        );
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        src: &NodeId,
        kind: EdgeKind,
        dst: &NodeId,
        props: Props,
    ) -> Result<EdgeKey, GraphError> {
        let src_kind = self
            .nodes
            .get(src)
            .ok_or_else(|| GraphError::MissingEndpoint(src.clone()))?
            .kind;
        let dst_kind = self
            .nodes
            .get(dst)
            .ok_or_else(|| GraphError::MissingEndpoint(dst.clone()))?
            .kind;
        if !kind.accepts(src_kind, dst_kind) {
            return Err(GraphError::SchemaViolation {
                kind,
                src_kind,
                dst_kind,
            });
        }
        check_edge_props(kind, &props)?;
        let key = EdgeKey {
            src: src.clone(),
            kind,
            dst: dst.clone(),
        };
        let out = self.out.entry((src.clone(), kind)).or_default();
        if out.contains_key(dst) {
            return Err(GraphError::DuplicateEdge(key));
        }
        out.insert(dst.clone(), props.clone());
        self.inc
            .entry((dst.clone(), kind))
            .or_default()
            .insert(src.clone(), props);
        Ok(key)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    /// Freezes the staged graph as `version`.
    pub fn commit(self, version: u64) -> Graph {
        Graph {
            nodes: self.nodes,
            out: self.out,
            inc: self.inc,
            version,
        }
    }
}

/// Committed, immutable graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    nodes: BTreeMap<NodeId, Node>,
    out: Adjacency,
    inc: Adjacency,
    version: u64,
}

impl Graph {
    pub fn empty(version: u64) -> Self {
        GraphBuilder::new().commit(version)
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    /// Same content, different version.
    pub fn with_version(mut self, version: u64) -> Self {
        self.version = version;
        self
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn kind_of(&self, id: &NodeId) -> Option<NodeKind> {
        self.nodes.get(id).map(|n| n.kind)
    }

    /// All nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &Node> {
        self.nodes.values().filter(move |n| n.kind == kind)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// All edges ordered by (src, kind, dst).
    pub fn edges(&self) -> impl Iterator<Item = (EdgeKey, &Props)> {
        self.out.iter().flat_map(|((src, kind), targets)| {
            targets.iter().map(move |(dst, props)| {
                (
                    EdgeKey {
                        src: src.clone(),
                        kind: *kind,
                        dst: dst.clone(),
                    },
                    props,
                )
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.out.values().map(BTreeMap::len).sum()
    }

    /// Neighbors over edges of `kind` in the given direction, ascending by id.
    pub fn neighbors(
        &self,
        node: &NodeId,
        kind: EdgeKind,
        direction: Direction,
    ) -> Result<Vec<(&NodeId, &Props)>, GraphError> {
        if !self.nodes.contains_key(node) {
            return Err(GraphError::UnknownNode(node.clone()));
        }
        Ok(self.adjacent(node, kind, direction).collect())
    }

    /// Like [`Graph::neighbors`] but yields nothing for unknown nodes.
    pub fn adjacent<'a>(
        &'a self,
        node: &NodeId,
        kind: EdgeKind,
        direction: Direction,
    ) -> impl Iterator<Item = (&'a NodeId, &'a Props)> + 'a {
        let map = match direction {
            Direction::Out => &self.out,
            Direction::In => &self.inc,
        };
        map.get(&(node.clone(), kind))
            .into_iter()
            .flat_map(|targets| targets.iter())
    }

    pub fn to_snapshot(&self) -> GraphSnapshot {
        GraphSnapshot {
            nodes: self.nodes.values().cloned().collect(),
            edges: self
                .edges()
                .map(|(key, props)| EdgeRecord {
                    src: key.src,
                    kind: key.kind,
                    dst: key.dst,
                    props: props.clone(),
                })
                .collect(),
            version: self.version,
        }
    }

    /// Rebuilds a graph from records, rejecting any schema violation.
    pub fn from_snapshot(snapshot: GraphSnapshot) -> Result<Self, GraphError> {
        let violations = validate_schema(&snapshot);
        if !violations.is_empty() {
            return Err(GraphError::Invalid(violations));
        }
        let mut builder = GraphBuilder::new();
        for node in snapshot.nodes {
            builder.add_node(node.kind, node.id, node.props)?;
        }
        for edge in snapshot.edges {
            builder.add_edge(&edge.src, edge.kind, &edge.dst, edge.props)?;
        }
        Ok(builder.commit(snapshot.version))
    }
}

/// Checks a record-form graph against the ontology schema. An empty
/// result means the snapshot is valid.
pub fn validate_schema(snapshot: &GraphSnapshot) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut kinds: BTreeMap<&NodeId, NodeKind> = BTreeMap::new();
    for node in &snapshot.nodes {
        if kinds.insert(&node.id, node.kind).is_some() {
            violations.push(Violation::DuplicateNode {
                node: node.id.clone(),
            });
        }
        let allowed = node.kind.allowed_properties();
        for key in node.props.keys() {
            if !allowed.contains(&key.as_str()) {
                violations.push(Violation::UnknownPropertyKey {
                    node: node.id.clone(),
                    key: key.clone(),
                });
            }
        }
    }

    let mut seen = std::collections::BTreeSet::new();
    for edge in &snapshot.edges {
        let key = EdgeKey {
            src: edge.src.clone(),
            kind: edge.kind,
            dst: edge.dst.clone(),
        };
        if !seen.insert(key.clone()) {
            violations.push(Violation::DuplicateEdge { edge: key.clone() });
        }
        let src_kind = kinds.get(&edge.src).copied();
        let dst_kind = kinds.get(&edge.dst).copied();
        for (endpoint, kind) in [(&edge.src, src_kind), (&edge.dst, dst_kind)] {
            if kind.is_none() {
                violations.push(Violation::ReferentialIntegrity {
                    edge: key.clone(),
                    missing: endpoint.clone(),
                });
            }
        }
        if let (Some(src_kind), Some(dst_kind)) = (src_kind, dst_kind) {
            if !edge.kind.accepts(src_kind, dst_kind) {
                violations.push(Violation::SchemaViolation {
                    edge: key.clone(),
                    src_kind,
                    dst_kind,
                });
            }
        }
        if edge.kind == EdgeKind::About {
            if !valid_score(about_score(&edge.props)) {
                violations.push(Violation::InvalidScore { edge: key.clone() });
            }
            for k in edge.props.keys().filter(|k| k.as_str() != "score") {
                violations.push(Violation::UnexpectedEdgeProperty {
                    edge: key.clone(),
                    key: k.clone(),
                });
            }
        } else {
            for k in edge.props.keys() {
                violations.push(Violation::UnexpectedEdgeProperty {
                    edge: key.clone(),
                    key: k.clone(),
                });
            }
        }
    }
    violations
}

/// Builds a property map from `(key, value)` pairs.
pub fn props<I, K, V>(pairs: I) -> Props
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: Into<PropValue>,
{
    pairs
        .into_iter()
        .map(|(k, v)| (k.into(), v.into()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> NodeId {
        NodeId::from(s)
    }

    fn none() -> Props {
        Props::new()
    }

    #[test]
    fn insert_then_get() {
        let mut b = GraphBuilder::new();
        let r1 = b
            .add_node(NodeKind::Researcher, id("r1"), props([("name", "A")]))
            .unwrap();
        assert_eq!(r1, id("r1"));
        let g = b.commit(1);
        assert_eq!(g.kind_of(&id("r1")), Some(NodeKind::Researcher));
    }

    #[test]
    fn duplicate_id_rejected_across_kinds() {
        let mut b = GraphBuilder::new();
        b.add_node(NodeKind::Researcher, id("r1"), none()).unwrap();
        assert_eq!(
            b.add_node(NodeKind::Researcher, id("r1"), none()),
            Err(GraphError::DuplicateId(id("r1")))
        );
        assert_eq!(
            b.add_node(NodeKind::Publication, id("r1"), none()),
            Err(GraphError::DuplicateId(id("r1")))
        );
    }

    #[test]
    fn publication_with_three_properties() {
        let mut b = GraphBuilder::new();
        let mut p = props([("title", "T")]);
        p.insert("year".into(), 2020i64.into());
        p.insert("citations".into(), 0i64.into());
        b.add_node(NodeKind::Publication, id("p1"), p).unwrap();
        let g = b.commit(1);
        let node = g.node(&id("p1")).unwrap();
        assert_eq!(node.props.len(), 3);
        assert_eq!(node.int_prop("year"), Some(2020));
    }

    #[test]
    fn unknown_property_key() {
        let mut b = GraphBuilder::new();
        let err = b
            .add_node(NodeKind::Researcher, id("r1"), props([("title", "x")]))
            .unwrap_err();
        assert!(matches!(err, GraphError::UnknownPropertyKey { .. }));
    }

    #[test]
    fn empty_id_rejected() {
        assert_eq!(NodeId::new(""), Err(GraphError::EmptyId));
    }

    fn small() -> GraphBuilder {
        let mut b = GraphBuilder::new();
        b.add_node(NodeKind::Researcher, id("r1"), none()).unwrap();
        b.add_node(NodeKind::Publication, id("p1"), none()).unwrap();
        b.add_node(NodeKind::Publication, id("p2"), none()).unwrap();
        b.add_node(NodeKind::FieldOfStudy, id("f1"), none())
            .unwrap();
        b
    }

    #[test]
    fn authored_edge_traverses_both_ways() {
        let mut b = small();
        b.add_edge(&id("r1"), EdgeKind::Authored, &id("p1"), none())
            .unwrap();
        let g = b.commit(1);
        let incoming: Vec<_> = g
            .neighbors(&id("p1"), EdgeKind::Authored, Direction::In)
            .unwrap()
            .into_iter()
            .map(|(n, _)| n.clone())
            .collect();
        assert_eq!(incoming, vec![id("r1")]);
    }

    #[test]
    fn reversed_endpoints_violate_schema() {
        let mut b = small();
        let err = b
            .add_edge(&id("p1"), EdgeKind::Authored, &id("r1"), none())
            .unwrap_err();
        assert!(matches!(err, GraphError::SchemaViolation { .. }));
    }

    #[test]
    fn about_score_range() {
        let mut b = small();
        let err = b
            .add_edge(
                &id("p1"),
                EdgeKind::About,
                &id("f1"),
                props([("score", 1.5)]),
            )
            .unwrap_err();
        assert_eq!(err, GraphError::InvalidScore(Some(1.5)));
        let err = b
            .add_edge(&id("p1"), EdgeKind::About, &id("f1"), none())
            .unwrap_err();
        assert_eq!(err, GraphError::InvalidScore(None));
        b.add_edge(
            &id("p1"),
            EdgeKind::About,
            &id("f1"),
            props([("score", 1.0)]),
        )
        .unwrap();
    }

    #[test]
    fn missing_endpoint() {
        let mut b = small();
        assert_eq!(
            b.add_edge(&id("r1"), EdgeKind::Authored, &id("nope"), none()),
            Err(GraphError::MissingEndpoint(id("nope")))
        );
    }

    #[test]
    fn non_about_edges_carry_no_props() {
        let mut b = small();
        let err = b
            .add_edge(
                &id("r1"),
                EdgeKind::Authored,
                &id("p1"),
                props([("score", 0.5)]),
            )
            .unwrap_err();
        assert!(matches!(err, GraphError::UnexpectedEdgeProperty { .. }));
    }

    #[test]
    fn neighbors_of_isolated_node_is_empty() {
        let g = small().commit(1);
        for kind in EdgeKind::ALL {
            for dir in [Direction::In, Direction::Out] {
                assert!(g.neighbors(&id("f1"), kind, dir).unwrap().is_empty());
            }
        }
        assert_eq!(
            g.neighbors(&id("zz"), EdgeKind::About, Direction::In),
            Err(GraphError::UnknownNode(id("zz")))
        );
    }

    #[test]
    fn neighbors_sorted_by_id() {
        let mut b = small();
        b.add_edge(&id("r1"), EdgeKind::Authored, &id("p2"), none())
            .unwrap();
        b.add_edge(&id("r1"), EdgeKind::Authored, &id("p1"), none())
            .unwrap();
        let g = b.commit(1);
        let out: Vec<_> = g
            .neighbors(&id("r1"), EdgeKind::Authored, Direction::Out)
            .unwrap()
            .into_iter()
            .map(|(n, _)| n.as_str().to_string())
            .collect();
        assert_eq!(out, ["p1", "p2"]);
    }

    #[test]
    fn part_of_direction_semantics() {
        let mut b = GraphBuilder::new();
        b.add_node(NodeKind::OrgUnit, id("u1"), none()).unwrap();
        b.add_node(NodeKind::OrgUnit, id("u2"), none()).unwrap();
        b.add_node(NodeKind::Institution, id("inst"), none())
            .unwrap();
        b.add_edge(&id("u1"), EdgeKind::PartOf, &id("u2"), none())
            .unwrap();
        b.add_edge(&id("u2"), EdgeKind::PartOf, &id("inst"), none())
            .unwrap();
        let g = b.commit(1);
        let names = |dir| -> Vec<String> {
            g.neighbors(&id("u2"), EdgeKind::PartOf, dir)
                .unwrap()
                .into_iter()
                .map(|(n, _)| n.to_string())
                .collect()
        };
        assert_eq!(names(Direction::In), ["u1"]);
        assert_eq!(names(Direction::Out), ["inst"]);
    }

    #[test]
    fn checked_construction_validates_clean() {
        let mut b = small();
        b.add_edge(&id("r1"), EdgeKind::Authored, &id("p1"), none())
            .unwrap();
        b.add_edge(
            &id("p1"),
            EdgeKind::About,
            &id("f1"),
            props([("score", 0.3)]),
        )
        .unwrap();
        let g = b.commit(4);
        let snap = g.to_snapshot();
        assert!(validate_schema(&snap).is_empty());
        assert_eq!(Graph::from_snapshot(snap).unwrap(), g);
    }

    #[test]
    fn dangling_endpoint_reported_once() {
        let mut snap = small().commit(1).to_snapshot();
        snap.edges.push(EdgeRecord {
            src: id("r1"),
            kind: EdgeKind::Authored,
            dst: id("ghost"),
            props: none(),
        });
        let v = validate_schema(&snap);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::ReferentialIntegrity { .. }));
    }

    #[test]
    fn child_of_from_researcher_reported() {
        let mut snap = small().commit(1).to_snapshot();
        snap.edges.push(EdgeRecord {
            src: id("r1"),
            kind: EdgeKind::ChildOf,
            dst: id("f1"),
            props: none(),
        });
        let v = validate_schema(&snap);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::SchemaViolation { .. }));
        assert!(Graph::from_snapshot(snap).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("researcher".parse::<NodeKind>(), Ok(NodeKind::Researcher));
        assert!("Conference".parse::<NodeKind>().is_err());
    }
}
