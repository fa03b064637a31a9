use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::ClassifierConfig;
use crate::graph::{Graph, GraphError, Node, NodeId};
use crate::inference::{InferenceError, Profiles};
use crate::search::{IndexConfig, IndexError, SearchIndex};
use crate::taxonomy::{Taxonomy, TaxonomyError};
use crate::text::Tokenizer;

/// Configuration a snapshot was built with; persisted in `meta`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BuildConfig {
    pub classifier: ClassifierConfig,
    pub index: IndexConfig,
    pub tokenizer: Tokenizer,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// One immutable, versioned state of the knowledge graph and every cache
/// derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub graph: Graph,
    pub taxonomy: Taxonomy,
    pub profiles: Profiles,
    pub index: SearchIndex,
    pub config: BuildConfig,
}

impl Snapshot {
    /// Derives taxonomy, profiles and the search index from `graph`.
    pub fn assemble(graph: Graph, config: BuildConfig) -> Result<Self, SnapshotError> {
        let taxonomy = Taxonomy::from_graph(&graph)?;
        let profiles = Profiles::compute(&graph)?;
        let index = SearchIndex::build(&graph, config.index, config.tokenizer.clone())?;
        Ok(Snapshot {
            graph,
            taxonomy,
            profiles,
            index,
            config,
        })
    }

    pub fn version(&self) -> u64 {
        self.graph.version()
    }

    pub fn with_version(mut self, version: u64) -> Self {
        self.graph = self.graph.with_version(version);
        self
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.graph.node(id)
    }
}
