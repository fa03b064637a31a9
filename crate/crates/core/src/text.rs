//! Tokenization, tf-idf term vectors and cosine similarity.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bundled English stopwords. Tokens shorter than two characters are
/// dropped regardless, so single letters are not listed.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any", "are",
    "as", "at", "be", "been", "before", "being", "below", "between", "both", "but", "by", "can",
    "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for", "from",
    "further", "had", "has", "have", "having", "he", "her", "here", "hers", "him", "his", "how",
    "if", "in", "into", "is", "it", "its", "itself", "just", "may", "me", "more", "most", "my",
    "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours",
    "out", "over", "own", "same", "she", "should", "so", "some", "such", "than", "that", "the",
    "their", "theirs", "them", "then", "there", "these", "they", "this", "those", "through", "to",
    "too", "under", "until", "up", "us", "very", "was", "we", "were", "what", "when", "where",
    "which", "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours",
];

#[derive(Debug, Error)]
pub enum TextError {
    #[error("vocabulary has no documents")]
    EmptyVocabulary,
    #[error("cannot read stopword file: {0}")]
    Io(#[from] std::io::Error),
}

/// Case-folding, Unicode-aware tokenizer with a stopword list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tokenizer {
    stopwords: BTreeSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self::with_stopwords(DEFAULT_STOPWORDS.iter().copied())
    }
}

impl Tokenizer {
    pub fn with_stopwords<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Tokenizer {
            stopwords: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// Parses a stopword file: one token per line, UTF-8.
    pub fn from_stopword_text(text: &str) -> Self {
        Self::with_stopwords(text.lines())
    }

    pub fn from_stopword_file(path: &std::path::Path) -> Result<Self, TextError> {
        Ok(Self::from_stopword_text(&std::fs::read_to_string(path)?))
    }

    pub fn stopwords(&self) -> impl Iterator<Item = &str> {
        self.stopwords.iter().map(String::as_str)
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
            .filter(|t| t.chars().count() >= 2 && !self.stopwords.contains(t))
            .collect()
    }
}

/// Document frequencies over a corpus of token lists.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Vocabulary {
    pub doc_count: usize,
    pub doc_freq: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn build<D, T>(docs: D) -> Self
    where
        D: IntoIterator<Item = T>,
        T: AsRef<[String]>,
    {
        let mut vocab = Vocabulary::default();
        for doc in docs {
            vocab.doc_count += 1;
            let distinct: BTreeSet<&String> = doc.as_ref().iter().collect();
            for t in distinct {
                *vocab.doc_freq.entry(t.clone()).or_insert(0) += 1;
            }
        }
        vocab
    }

    pub fn df(&self, term: &str) -> usize {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }

    /// Smoothed inverse document frequency.
    pub fn idf(&self, term: &str) -> f64 {
        let n = self.doc_count as f64;
        let df = self.df(term) as f64;
        ((n + 1.0) / (df + 1.0) + 1.0).ln()
    }

    /// `(1 + ln tf) * idf` for every distinct token.
    pub fn weight_vector(&self, tokens: &[String]) -> Result<TermVector, TextError> {
        if self.doc_count == 0 {
            return Err(TextError::EmptyVocabulary);
        }
        let mut tf: BTreeMap<&str, usize> = BTreeMap::new();
        for t in tokens {
            *tf.entry(t.as_str()).or_insert(0) += 1;
        }
        let entries = tf
            .into_iter()
            .map(|(t, n)| (t.to_string(), (1.0 + (n as f64).ln()) * self.idf(t)))
            .filter(|(_, w)| *w > 0.0)
            .collect();
        Ok(TermVector { entries })
    }
}

/// Sparse non-negative term weights. Zero weights are never stored.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TermVector {
    entries: BTreeMap<String, f64>,
}

impl TermVector {
    /// Builds a vector, discarding zero, negative and non-finite weights.
    pub fn from_weights<I, S>(weights: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        TermVector {
            entries: weights
                .into_iter()
                .filter(|(_, w)| *w > 0.0 && w.is_finite())
                .map(|(t, w)| (t.into(), w))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, term: &str) -> f64 {
        self.entries.get(term).copied().unwrap_or(0.0)
    }

    /// Entries in ascending term order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(t, w)| (t.as_str(), *w))
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Sum of squared weights, accumulated in ascending term order.
    pub fn norm_squared(&self) -> f64 {
        self.entries.values().map(|w| w * w).sum()
    }

    pub fn scaled(&self, factor: f64) -> TermVector {
        TermVector::from_weights(self.entries.iter().map(|(t, w)| (t.clone(), w * factor)))
    }
}

/// Cosine of two dot/norm values, clamped to `[0, 1]`.
pub(crate) fn cosine_from_parts(dot: f64, norm_a: f64, norm_b: f64) -> f64 {
    if dot <= 0.0 || norm_a <= 0.0 || norm_b <= 0.0 {
        return 0.0;
    }
    (dot / (norm_a * norm_b).sqrt()).min(1.0)
}

/// Cosine similarity; 0 when either vector is empty.
pub fn cosine(a: &TermVector, b: &TermVector) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut dot = 0.0;
    for (t, w) in a.iter() {
        if let Some(v) = b.entries.get(t) {
            dot += w * v;
        }
    }
    cosine_from_parts(dot, a.norm_squared(), b.norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn tokenize_folds_and_splits() {
        let t = Tokenizer::default();
        assert_eq!(t.tokenize("Knowledge Graphs!"), ["knowledge", "graphs"]);
        assert!(t.tokenize("").is_empty());
    }

    #[test]
    fn tokenize_stopwords_and_length() {
        let t = Tokenizer::with_stopwords(["a"]);
        assert_eq!(t.tokenize("a AI ai"), ["ai", "ai"]);
    }

    #[test]
    fn tokenize_unicode() {
        let t = Tokenizer::with_stopwords::<_, &str>([]);
        assert_eq!(
            t.tokenize("Über-Graphen, Ärzte/Straße x2"),
            ["über", "graphen", "ärzte", "straße", "x2"]
        );
    }

    #[test]
    fn stopword_file_format() {
        let t = Tokenizer::from_stopword_text("the\n  Graph \n\n");
        assert_eq!(t.tokenize("The graph theory"), ["theory"]);
    }

    #[test]
    fn vocabulary_counts_presence() {
        let v = Vocabulary::build([toks(&["a", "b"]), toks(&["b"])]);
        assert_eq!(v.doc_count, 2);
        assert_eq!(v.df("a"), 1);
        assert_eq!(v.df("b"), 2);
        let empty = Vocabulary::build(Vec::<Vec<String>>::new());
        assert_eq!(empty.doc_count, 0);
        assert!(empty.doc_freq.is_empty());
        let v = Vocabulary::build([toks(&["b", "b", "b"])]);
        assert_eq!(v.df("b"), 1);
    }

    #[test]
    fn weight_hand_evaluated() {
        let v = Vocabulary::build([toks(&["a", "b"]), toks(&["b"])]);
        let w = v.weight_vector(&toks(&["b"])).unwrap();
        // (1 + ln 1) * ln(3/3 + 1)
        assert!((w.get("b") - 2f64.ln()).abs() < 1e-15);
        assert!((w.get("b") - 0.6931).abs() < 1e-4);
        assert!(v.weight_vector(&[]).unwrap().is_empty());
        let twice = v.weight_vector(&toks(&["b", "b"])).unwrap();
        assert!((twice.get("b") / w.get("b") - (1.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn unseen_term_uses_zero_df() {
        let v = Vocabulary::build([toks(&["a"])]);
        let w = v.weight_vector(&toks(&["zzz"])).unwrap();
        assert!((w.get("zzz") - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn empty_vocabulary_rejected() {
        let v = Vocabulary::default();
        assert!(matches!(
            v.weight_vector(&toks(&["a"])),
            Err(TextError::EmptyVocabulary)
        ));
    }

    #[test]
    fn cosine_examples() {
        let a = TermVector::from_weights([("x", 1.0), ("y", 1.0)]);
        let b = TermVector::from_weights([("x", 1.0)]);
        let c = TermVector::from_weights([("z", 3.0)]);
        assert_eq!(cosine(&a, &a), 1.0);
        assert_eq!(cosine(&a, &c), 0.0);
        assert!((cosine(&a, &b) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(cosine(&a, &TermVector::default()), 0.0);
    }

    #[test]
    fn zero_weights_not_stored() {
        let v = TermVector::from_weights([("x", 0.0), ("y", 2.0)]);
        assert_eq!(v.len(), 1);
    }
}
