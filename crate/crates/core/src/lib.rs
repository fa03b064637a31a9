//! Knowledge-graph engine for exploring an institution's research by field
//! of study: graph model, taxonomy, text semantics, classification,
//! inference, search, recommendations, analytics, ingest and persistence.

pub mod analytics;
pub mod classifier;
pub mod distribution;
pub mod graph;
pub mod inference;
pub mod ingest;
pub mod recommend;
pub mod search;
pub mod snapshot;
pub mod store;
pub mod taxonomy;
pub mod text;
pub mod views;

pub use distribution::TopicDistribution;
pub use graph::{
    Direction, EdgeKind, Graph, GraphBuilder, Node, NodeId, NodeKind, PropValue, Props,
};
pub use snapshot::{BuildConfig, Snapshot};
pub use taxonomy::Taxonomy;
