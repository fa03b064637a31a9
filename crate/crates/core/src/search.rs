//! BM25 full-text index over every entity kind.
//!
//! Each node contributes one document per indexed field. Corpus statistics
//! (document count, average length, document frequency) are kept per
//! field, and a node's score is the sum of its per-field BM25 scores.
//! Queries are OR-of-terms.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId, NodeKind};
use crate::text::Tokenizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Abstract,
    Description,
    Name,
    Title,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Abstract => "abstract",
            Field::Description => "description",
            Field::Name => "name",
            Field::Title => "title",
        }
    }

    fn code(self) -> u8 {
        self as u8
    }

    fn from_code(code: u8) -> Option<Field> {
        [
            Field::Abstract,
            Field::Description,
            Field::Name,
            Field::Title,
        ]
        .get(code as usize)
        .copied()
    }

    /// Fields indexed for a node kind, in ascending field order.
    pub fn indexed_for(kind: NodeKind) -> &'static [Field] {
        match kind {
            NodeKind::Researcher | NodeKind::OrgUnit | NodeKind::Institution => &[Field::Name],
            NodeKind::Publication => &[Field::Abstract, Field::Title],
            NodeKind::FieldOfStudy => &[Field::Description, Field::Name],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IndexConfig {
    pub k1: f64,
    pub b: f64,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig { k1: 1.2, b: 0.75 }
    }
}

impl IndexConfig {
    pub fn validate(&self) -> Result<(), IndexError> {
        if !(self.k1 > 0.0 && self.k1.is_finite()) || !(0.0..=1.0).contains(&self.b) {
            return Err(IndexError::InvalidConfig(*self));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("invalid index config {0:?}: need k1 > 0 and 0 <= b <= 1")]
    InvalidConfig(IndexConfig),
    #[error("corrupt index: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub node: NodeId,
    pub kind: NodeKind,
    pub score: f64,
    pub matched_fields: Vec<Field>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Posting {
    doc: u32,
    field: Field,
    tf: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Doc {
    id: NodeId,
    kind: NodeKind,
    lengths: Vec<(Field, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct FieldStats {
    docs: u64,
    total_len: u64,
}

impl FieldStats {
    fn avg_len(&self) -> f64 {
        if self.docs == 0 {
            0.0
        } else {
            self.total_len as f64 / self.docs as f64
        }
    }
}

/// Immutable inverted index.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchIndex {
    config: IndexConfig,
    tokenizer: Tokenizer,
    docs: Vec<Doc>,
    postings: BTreeMap<String, Vec<Posting>>,
    stats: BTreeMap<Field, FieldStats>,
}

/// Text of `field` on `node`, or empty.
fn field_text(node: &crate::graph::Node, field: Field) -> &str {
    node.str_prop(field.as_str()).unwrap_or("")
}

/// Okapi BM25 idf, always positive.
pub fn bm25_idf(docs: u64, df: u64) -> f64 {
    let n = docs as f64;
    let df = df as f64;
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

/// BM25 term-frequency component.
pub fn bm25_tf(tf: f64, len: f64, avg_len: f64, cfg: &IndexConfig) -> f64 {
    let norm = if avg_len > 0.0 { len / avg_len } else { 0.0 };
    tf * (cfg.k1 + 1.0) / (tf + cfg.k1 * (1.0 - cfg.b + cfg.b * norm))
}

impl SearchIndex {
    pub fn build(
        graph: &Graph,
        config: IndexConfig,
        tokenizer: Tokenizer,
    ) -> Result<Self, IndexError> {
        config.validate()?;
        let mut docs = Vec::new();
        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        for (doc_idx, node) in graph.nodes().enumerate() {
            let mut lengths = Vec::new();
            for &field in Field::indexed_for(node.kind) {
                let tokens = tokenizer.tokenize(field_text(node, field));
                lengths.push((field, tokens.len() as u32));
                let mut tf: BTreeMap<String, u32> = BTreeMap::new();
                for t in tokens {
                    *tf.entry(t).or_insert(0) += 1;
                }
                for (term, tf) in tf {
                    postings.entry(term).or_default().push(Posting {
                        doc: doc_idx as u32,
                        field,
                        tf,
                    });
                }
            }
            docs.push(Doc {
                id: node.id.clone(),
                kind: node.kind,
                lengths,
            });
        }
        // Nodes are visited in id order and fields in field order, so every
        // posting list is already sorted by (doc, field).
        Ok(Self::assemble(config, tokenizer, docs, postings))
    }

    fn assemble(
        config: IndexConfig,
        tokenizer: Tokenizer,
        docs: Vec<Doc>,
        postings: BTreeMap<String, Vec<Posting>>,
    ) -> Self {
        let mut stats: BTreeMap<Field, FieldStats> = BTreeMap::new();
        for doc in &docs {
            for (field, len) in &doc.lengths {
                let s = stats.entry(*field).or_default();
                s.docs += 1;
                s.total_len += *len as u64;
            }
        }
        SearchIndex {
            config,
            tokenizer,
            docs,
            postings,
            stats,
        }
    }

    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    /// Distinct query terms in ascending order.
    pub fn query_terms(&self, query: &str) -> Vec<String> {
        let set: BTreeSet<String> = self.tokenizer.tokenize(query).into_iter().collect();
        set.into_iter().collect()
    }

    /// Ranked lookup. `kinds` of `None` admits every kind.
    pub fn lookup(
        &self,
        query: &str,
        kinds: Option<&BTreeSet<NodeKind>>,
        limit: usize,
        offset: usize,
    ) -> Vec<SearchHit> {
        let mut scores: BTreeMap<u32, (f64, BTreeSet<Field>)> = BTreeMap::new();
        for term in self.query_terms(query) {
            let Some(list) = self.postings.get(&term) else {
                continue;
            };
            let mut df: BTreeMap<Field, u64> = BTreeMap::new();
            for p in list {
                *df.entry(p.field).or_insert(0) += 1;
            }
            for p in list {
                let doc = &self.docs[p.doc as usize];
                if kinds.is_some_and(|k| !k.contains(&doc.kind)) {
                    continue;
                }
                let stats = self.stats[&p.field];
                let len = doc
                    .lengths
                    .iter()
                    .find(|(f, _)| *f == p.field)
                    .map(|(_, l)| *l)
                    .unwrap_or(0);
                let contribution = bm25_idf(stats.docs, df[&p.field])
                    * bm25_tf(p.tf as f64, len as f64, stats.avg_len(), &self.config);
                let entry = scores.entry(p.doc).or_insert((0.0, BTreeSet::new()));
                entry.0 += contribution;
                entry.1.insert(p.field);
            }
        }
        let mut hits: Vec<SearchHit> = scores
            .into_iter()
            .filter(|(_, (score, _))| *score > 0.0)
            .map(|(doc, (score, fields))| {
                let doc = &self.docs[doc as usize];
                SearchHit {
                    node: doc.id.clone(),
                    kind: doc.kind,
                    score,
                    matched_fields: fields.into_iter().collect(),
                }
            })
            .collect();
        hits.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.node.cmp(&b.node))
        });
        hits.into_iter().skip(offset).take(limit).collect()
    }

    const MAGIC: &'static [u8; 8] = b"FOSIDX01";

    /// Writes the index in its binary form. Output is byte-stable.
    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(Self::MAGIC)?;
        out.write_f64::<LittleEndian>(self.config.k1)?;
        out.write_f64::<LittleEndian>(self.config.b)?;
        out.write_u32::<LittleEndian>(self.docs.len() as u32)?;
        for doc in &self.docs {
            write_str(&mut out, doc.id.as_str())?;
            out.write_u8(kind_code(doc.kind))?;
            out.write_u8(doc.lengths.len() as u8)?;
            for (field, len) in &doc.lengths {
                out.write_u8(field.code())?;
                out.write_u32::<LittleEndian>(*len)?;
            }
        }
        out.write_u32::<LittleEndian>(self.postings.len() as u32)?;
        for (term, list) in &self.postings {
            write_str(&mut out, term)?;
            out.write_u32::<LittleEndian>(list.len() as u32)?;
            for p in list {
                out.write_u32::<LittleEndian>(p.doc)?;
                out.write_u8(p.field.code())?;
                out.write_u32::<LittleEndian>(p.tf)?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_from<R: Read>(mut input: R, tokenizer: Tokenizer) -> Result<Self, IndexError> {
        let corrupt = |m: &str| IndexError::Corrupt(m.to_string());
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(corrupt("bad magic"));
        }
        let config = IndexConfig {
            k1: input.read_f64::<LittleEndian>()?,
            b: input.read_f64::<LittleEndian>()?,
        };
        config.validate()?;
        let n_docs = input.read_u32::<LittleEndian>()?;
        let mut docs = Vec::with_capacity(n_docs.min(1 << 20) as usize);
        for _ in 0..n_docs {
            let id = NodeId::new(read_str(&mut input)?).map_err(|_| corrupt("empty node id"))?;
            let kind = kind_from_code(input.read_u8()?).ok_or_else(|| corrupt("bad kind"))?;
            let n_fields = input.read_u8()?;
            let mut lengths = Vec::new();
            for _ in 0..n_fields {
                let field =
                    Field::from_code(input.read_u8()?).ok_or_else(|| corrupt("bad field"))?;
                lengths.push((field, input.read_u32::<LittleEndian>()?));
            }
            docs.push(Doc { id, kind, lengths });
        }
        let n_terms = input.read_u32::<LittleEndian>()?;
        let mut postings = BTreeMap::new();
        for _ in 0..n_terms {
            let term = read_str(&mut input)?;
            let n = input.read_u32::<LittleEndian>()?;
            let mut list = Vec::with_capacity(n.min(1 << 20) as usize);
            for _ in 0..n {
                let doc = input.read_u32::<LittleEndian>()?;
                if doc >= n_docs {
                    return Err(corrupt("posting references unknown document"));
                }
                let field =
                    Field::from_code(input.read_u8()?).ok_or_else(|| corrupt("bad field"))?;
                let tf = input.read_u32::<LittleEndian>()?;
                list.push(Posting { doc, field, tf });
            }
            postings.insert(term, list);
        }
        let mut rest = Vec::new();
        input.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(corrupt("trailing bytes"));
        }
        Ok(Self::assemble(config, tokenizer, docs, postings))
    }
}

fn kind_code(kind: NodeKind) -> u8 {
    NodeKind::ALL.iter().position(|k| *k == kind).unwrap() as u8
}

fn kind_from_code(code: u8) -> Option<NodeKind> {
    NodeKind::ALL.get(code as usize).copied()
}

fn write_str<W: Write>(out: &mut W, s: &str) -> io::Result<()> {
    out.write_u32::<LittleEndian>(s.len() as u32)?;
    out.write_all(s.as_bytes())
}

fn read_str<R: Read>(input: &mut R) -> Result<String, IndexError> {
    let len = input.read_u32::<LittleEndian>()? as usize;
    if len > 1 << 24 {
        return Err(IndexError::Corrupt("string too long".into()));
    }
    let mut buf = vec![0u8; len];
    input.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| IndexError::Corrupt("invalid utf-8".into()))
}
