//! Tags publications with taxonomy concepts by tf-idf cosine similarity.
//!
//! Concepts and publications are weighted against separate vocabularies:
//! concept vectors against the concept corpus, publication vectors against
//! the publication corpus being classified.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::NodeId;
use crate::taxonomy::Taxonomy;
use crate::text::{cosine_from_parts, TermVector, TextError, Tokenizer, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    /// Scores must be strictly greater than this to be kept.
    pub threshold: f64,
    pub top_k: usize,
    /// How many times title (or concept name) tokens are repeated.
    pub title_boost: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            threshold: 0.05,
            top_k: 5,
            title_boost: 2,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        if !(0.0..1.0).contains(&self.threshold) {
            return Err(ClassifyError::InvalidConfig(format!(
                "threshold must be in [0, 1), got {}",
                self.threshold
            )));
        }
        if self.top_k == 0 {
            return Err(ClassifyError::InvalidConfig("top_k must be >= 1".into()));
        }
        if self.title_boost == 0 {
            return Err(ClassifyError::InvalidConfig(
                "title_boost must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("taxonomy has no concepts")]
    EmptyTaxonomy,
    #[error("unknown concept `{0}`")]
    UnknownConcept(NodeId),
    #[error("publication `{0}` has an empty title")]
    EmptyTitle(NodeId),
    #[error("invalid classifier config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Text(#[from] TextError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FosScore {
    pub fos: NodeId,
    pub score: f64,
}

/// Text fields of a publication relevant to classification.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicationText {
    pub id: NodeId,
    pub title: String,
    pub abstract_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub publication: NodeId,
    pub tags: Vec<FosScore>,
}

/// One line of the classification audit report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub publication: NodeId,
    pub tags: Vec<(NodeId, f64)>,
    pub config: ClassifierConfig,
}

fn repeat_tokens(out: &mut Vec<String>, tokens: &[String], times: usize) {
    for _ in 0..times {
        out.extend_from_slice(tokens);
    }
}

/// Token list for a concept: boosted name, description, direct child names.
pub fn concept_tokens(
    taxonomy: &Taxonomy,
    fos: &NodeId,
    tokenizer: &Tokenizer,
    title_boost: usize,
) -> Result<Vec<String>, ClassifyError> {
    let concept = taxonomy
        .concept(fos)
        .ok_or_else(|| ClassifyError::UnknownConcept(fos.clone()))?;
    let mut tokens = Vec::new();
    repeat_tokens(&mut tokens, &tokenizer.tokenize(&concept.name), title_boost);
    tokens.extend(tokenizer.tokenize(&concept.description));
    for child in taxonomy.children(fos) {
        let name = &taxonomy.concept(child).expect("child exists").name;
        tokens.extend(tokenizer.tokenize(name));
    }
    Ok(tokens)
}

/// Token list for a publication: boosted title followed by the abstract.
pub fn publication_tokens(
    publication: &PublicationText,
    tokenizer: &Tokenizer,
    title_boost: usize,
) -> Result<Vec<String>, ClassifyError> {
    if publication.title.trim().is_empty() {
        return Err(ClassifyError::EmptyTitle(publication.id.clone()));
    }
    let mut tokens = Vec::new();
    repeat_tokens(
        &mut tokens,
        &tokenizer.tokenize(&publication.title),
        title_boost,
    );
    tokens.extend(tokenizer.tokenize(&publication.abstract_text));
    Ok(tokens)
}

struct ConceptEntry {
    id: NodeId,
    vector: TermVector,
    norm: f64,
}

/// Concept vectors plus a term → (concept, weight) inverted index.
pub struct Classifier {
    config: ClassifierConfig,
    tokenizer: Tokenizer,
    concepts: Vec<ConceptEntry>,
    postings: BTreeMap<String, Vec<(usize, f64)>>,
    vocabulary: Vocabulary,
}

impl Classifier {
    pub fn new(
        taxonomy: &Taxonomy,
        tokenizer: Tokenizer,
        config: ClassifierConfig,
    ) -> Result<Self, ClassifyError> {
        config.validate()?;
        if taxonomy.is_empty() {
            return Err(ClassifyError::EmptyTaxonomy);
        }
        let token_lists: Vec<(NodeId, Vec<String>)> = taxonomy
            .concepts()
            .map(|c| {
                concept_tokens(taxonomy, &c.id, &tokenizer, config.title_boost)
                    .map(|t| (c.id.clone(), t))
            })
            .collect::<Result<_, _>>()?;
        let vocabulary = Vocabulary::build(token_lists.iter().map(|(_, t)| t));
        let mut concepts = Vec::with_capacity(token_lists.len());
        let mut postings: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
        for (idx, (id, tokens)) in token_lists.into_iter().enumerate() {
            let vector = vocabulary.weight_vector(&tokens)?;
            for (term, w) in vector.iter() {
                postings.entry(term.to_string()).or_default().push((idx, w));
            }
            let norm = vector.norm_squared();
            concepts.push(ConceptEntry { id, vector, norm });
        }
        Ok(Classifier {
            config,
            tokenizer,
            concepts,
            postings,
            vocabulary,
        })
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    pub fn concept_vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn concept_representation(&self, fos: &NodeId) -> Result<&TermVector, ClassifyError> {
        self.concepts
            .binary_search_by(|c| c.id.cmp(fos))
            .map(|idx| &self.concepts[idx].vector)
            .map_err(|_| ClassifyError::UnknownConcept(fos.clone()))
    }

    /// Tokenizes a corpus and builds its vocabulary.
    pub fn publication_corpus(
        &self,
        publications: &[PublicationText],
    ) -> Result<PublicationCorpus, ClassifyError> {
        let tokens: Vec<Vec<String>> = publications
            .iter()
            .map(|p| publication_tokens(p, &self.tokenizer, self.config.title_boost))
            .collect::<Result<_, _>>()?;
        let vocabulary = Vocabulary::build(&tokens);
        Ok(PublicationCorpus {
            ids: publications.iter().map(|p| p.id.clone()).collect(),
            tokens,
            vocabulary,
        })
    }

    /// Scores one publication vector against every concept.
    pub fn classify_vector(&self, vector: &TermVector) -> Vec<FosScore> {
        if vector.is_empty() {
            return Vec::new();
        }
        // Accumulate dot products term by term in ascending term order.
        let mut dots: BTreeMap<usize, f64> = BTreeMap::new();
        for (term, w) in vector.iter() {
            if let Some(list) = self.postings.get(term) {
                for (idx, cw) in list {
                    *dots.entry(*idx).or_insert(0.0) += w * cw;
                }
            }
        }
        let norm = vector.norm_squared();
        let mut scored: Vec<FosScore> = dots
            .into_iter()
            .map(|(idx, dot)| FosScore {
                fos: self.concepts[idx].id.clone(),
                score: cosine_from_parts(dot, norm, self.concepts[idx].norm),
            })
            .filter(|s| s.score > self.config.threshold)
            .collect();
        scored.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.fos.cmp(&b.fos)));
        scored.truncate(self.config.top_k);
        scored
    }

    /// Classifies every publication; output is in input order.
    pub fn classify_all(
        &self,
        publications: &[PublicationText],
    ) -> Result<Vec<Classification>, ClassifyError> {
        let corpus = self.publication_corpus(publications)?;
        (0..corpus.len())
            .into_par_iter()
            .map(|i| {
                let vector = corpus.vector(i)?;
                Ok(Classification {
                    publication: corpus.ids[i].clone(),
                    tags: self.classify_vector(&vector),
                })
            })
            .collect()
    }

    pub fn report(&self, results: &[Classification]) -> Vec<ReportRecord> {
        results
            .iter()
            .map(|c| ReportRecord {
                publication: c.publication.clone(),
                tags: c.tags.iter().map(|t| (t.fos.clone(), t.score)).collect(),
                config: self.config,
            })
            .collect()
    }
}

/// Tokenized publications and their corpus vocabulary.
pub struct PublicationCorpus {
    ids: Vec<NodeId>,
    tokens: Vec<Vec<String>>,
    vocabulary: Vocabulary,
}

impl PublicationCorpus {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn vector(&self, idx: usize) -> Result<TermVector, ClassifyError> {
        Ok(self.vocabulary.weight_vector(&self.tokens[idx])?)
    }

    pub fn publication_representation(&self, id: &NodeId) -> Option<TermVector> {
        let idx = self.ids.iter().position(|p| p == id)?;
        self.vector(idx).ok()
    }
}

/// Serializes report records as newline-delimited JSON.
pub fn write_report<W: std::io::Write>(
    mut out: W,
    records: &[ReportRecord],
) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
