//! Brute-force reference computations.
//!
//! Each oracle takes plain records and recomputes its answer by direct
//! enumeration: every pair, every path, every document. They are slow on
//! purpose and share no code with the engine.

use std::collections::{BTreeMap, BTreeSet};

use crate::fixtures::{Concept, Publication, Researcher, Unit};

pub type Weights = BTreeMap<String, f64>;

/// Tokenizer under test, passed in so both sides tokenize identically.
pub type Tokenize<'a> = &'a dyn Fn(&str) -> Vec<String>;

pub fn normalize(w: &Weights) -> Weights {
    let kept: Weights = w
        .iter()
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    let total: f64 = kept.values().sum();
    if total <= 0.0 {
        return Weights::new();
    }
    kept.into_iter().map(|(k, v)| (k, v / total)).collect()
}

pub fn total(w: &Weights) -> f64 {
    w.values().sum()
}

// ---------------------------------------------------------------- text

/// tf-idf of `doc` against `corpus`, df counted by scanning every document.
pub fn tfidf(doc: &[String], corpus: &[Vec<String>]) -> Weights {
    let n = corpus.len() as f64;
    let mut out = Weights::new();
    let distinct: BTreeSet<&String> = doc.iter().collect();
    for term in distinct {
        let tf = doc.iter().filter(|t| *t == term).count() as f64;
        let df = corpus.iter().filter(|d| d.contains(term)).count() as f64;
        let w = (1.0 + tf.ln()) * ((n + 1.0) / (df + 1.0) + 1.0).ln();
        if w > 0.0 {
            out.insert(term.clone(), w);
        }
    }
    out
}

/// Cosine, accumulating over keys in ascending order.
pub fn cosine(a: &Weights, b: &Weights) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut dot = 0.0;
    for (k, x) in a {
        if let Some(y) = b.get(k) {
            dot += x * y;
        }
    }
    let na: f64 = a.values().map(|x| x * x).sum();
    let nb: f64 = b.values().map(|x| x * x).sum();
    if dot <= 0.0 || na <= 0.0 || nb <= 0.0 {
        return 0.0;
    }
    (dot / (na * nb).sqrt()).min(1.0)
}

// ------------------------------------------------------------ taxonomy

pub struct TaxonomyOracle {
    concepts: BTreeMap<String, Concept>,
    levels: BTreeMap<String, u32>,
}

impl TaxonomyOracle {
    pub fn new(concepts: &[Concept]) -> Self {
        let concepts: BTreeMap<String, Concept> =
            concepts.iter().map(|c| (c.id.clone(), c.clone())).collect();
        let mut levels = BTreeMap::new();
        for id in concepts.keys() {
            level_of(&concepts, id, &mut levels);
        }
        TaxonomyOracle { concepts, levels }
    }

    pub fn level(&self, id: &str) -> u32 {
        self.levels[id]
    }

    pub fn ids(&self) -> impl Iterator<Item = &String> {
        self.concepts.keys()
    }

    pub fn concept(&self, id: &str) -> &Concept {
        &self.concepts[id]
    }

    pub fn roots(&self) -> Vec<String> {
        self.concepts
            .values()
            .filter(|c| c.parents.is_empty())
            .map(|c| c.id.clone())
            .collect()
    }

    pub fn children(&self, id: &str) -> Vec<String> {
        self.concepts
            .values()
            .filter(|c| c.parents.iter().any(|p| p == id))
            .map(|c| c.id.clone())
            .collect()
    }

    /// Every parent chain from `id`, each cut at its first concept on `level`.
    pub fn ancestors_at_level(&self, id: &str, level: u32) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut chains = vec![vec![id.to_string()]];
        while let Some(chain) = chains.pop() {
            let last = chain.last().unwrap();
            let l = self.level(last);
            if l == level {
                out.insert(last.clone());
                continue;
            }
            if l < level {
                continue;
            }
            for p in &self.concepts[last].parents {
                let mut next = chain.clone();
                next.push(p.clone());
                chains.push(next);
            }
        }
        out
    }

    /// Unnormalized roll-up mass and the mass of inputs that were kept.
    pub fn rollup_mass(&self, d: &Weights, level: u32) -> (Weights, f64) {
        let mut mass = Weights::new();
        let mut kept = 0.0;
        for (f, w) in d {
            if !self.concepts.contains_key(f) || self.level(f) < level {
                continue;
            }
            kept += w;
            let anc = self.ancestors_at_level(f, level);
            for a in &anc {
                *mass.entry(a.clone()).or_insert(0.0) += w / anc.len() as f64;
            }
        }
        (mass, kept)
    }

    pub fn rollup(&self, d: &Weights, level: u32) -> Weights {
        normalize(&self.rollup_mass(d, level).0)
    }
}

fn level_of(
    concepts: &BTreeMap<String, Concept>,
    id: &str,
    memo: &mut BTreeMap<String, u32>,
) -> u32 {
    if let Some(l) = memo.get(id) {
        return *l;
    }
    let parents = concepts[id].parents.clone();
    let l = if parents.is_empty() {
        0
    } else {
        1 + parents
            .iter()
            .map(|p| level_of(concepts, p, memo))
            .min()
            .unwrap()
    };
    memo.insert(id.to_string(), l);
    l
}

// ------------------------------------------------------- classification

#[derive(Debug, Clone, Copy)]
pub struct ClassifyParams {
    pub threshold: f64,
    pub top_k: usize,
    pub title_boost: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            threshold: 0.05,
            top_k: 5,
            title_boost: 2,
        }
    }
}

fn boosted(tokens: Vec<String>, boost: usize) -> Vec<String> {
    let mut out = Vec::new();
    for _ in 0..boost {
        out.extend(tokens.iter().cloned());
    }
    out
}

pub fn concept_document(
    tax: &TaxonomyOracle,
    id: &str,
    tokenize: Tokenize,
    boost: usize,
) -> Vec<String> {
    let c = tax.concept(id);
    let mut doc = boosted(tokenize(&c.name), boost);
    doc.extend(tokenize(&c.description));
    for child in tax.children(id) {
        doc.extend(tokenize(&tax.concept(&child).name));
    }
    doc
}

pub fn publication_document(p: &Publication, tokenize: Tokenize, boost: usize) -> Vec<String> {
    let mut doc = boosted(tokenize(&p.title), boost);
    doc.extend(tokenize(&p.abstract_text));
    doc
}

/// Tags per publication from every publication x concept cosine.
pub fn classify(
    concepts: &[Concept],
    publications: &[Publication],
    tokenize: Tokenize,
    params: ClassifyParams,
) -> BTreeMap<String, Vec<(String, f64)>> {
    let tax = TaxonomyOracle::new(concepts);
    let concept_docs: Vec<(String, Vec<String>)> = tax
        .ids()
        .map(|id| {
            (
                id.clone(),
                concept_document(&tax, id, tokenize, params.title_boost),
            )
        })
        .collect();
    let concept_corpus: Vec<Vec<String>> = concept_docs.iter().map(|(_, d)| d.clone()).collect();
    let concept_vectors: Vec<(String, Weights)> = concept_docs
        .iter()
        .map(|(id, d)| (id.clone(), tfidf(d, &concept_corpus)))
        .collect();
    let pub_docs: Vec<Vec<String>> = publications
        .iter()
        .map(|p| publication_document(p, tokenize, params.title_boost))
        .collect();

    let mut out = BTreeMap::new();
    for (p, doc) in publications.iter().zip(&pub_docs) {
        let v = tfidf(doc, &pub_docs);
        let mut scored: Vec<(String, f64)> = concept_vectors
            .iter()
            .map(|(id, cv)| (id.clone(), cosine(&v, cv)))
            .filter(|(_, s)| *s > params.threshold)
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(params.top_k);
        out.insert(p.id.clone(), scored);
    }
    out
}

// ------------------------------------------------------------ inference

pub fn mean(parts: &[&Weights]) -> Weights {
    let nonempty: Vec<&&Weights> = parts.iter().filter(|p| !p.is_empty()).collect();
    if nonempty.is_empty() {
        return Weights::new();
    }
    let mut acc = Weights::new();
    for p in &nonempty {
        for (k, v) in p.iter() {
            *acc.entry(k.clone()).or_insert(0.0) += v;
        }
    }
    let n = nonempty.len() as f64;
    normalize(&acc.into_iter().map(|(k, v)| (k, v / n)).collect())
}

#[derive(Debug, Clone, Default)]
pub struct Profiles {
    pub publications: BTreeMap<String, Weights>,
    pub researchers: BTreeMap<String, Weights>,
    pub units: BTreeMap<String, Weights>,
}

/// Units in the subtree rooted at `root`, found by repeated scans.
pub fn subtree(units: &[Unit], root: &str) -> BTreeSet<String> {
    let mut set: BTreeSet<String> = [root.to_string()].into();
    loop {
        let before = set.len();
        for u in units {
            if u.parent_id.as_ref().is_some_and(|p| set.contains(p)) {
                set.insert(u.id.clone());
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

pub fn infer(
    tags: &BTreeMap<String, Vec<(String, f64)>>,
    units: &[Unit],
    researchers: &[Researcher],
    publications: &[Publication],
) -> Profiles {
    let mut out = Profiles::default();
    for p in publications {
        let w: Weights = tags.get(&p.id).into_iter().flatten().cloned().collect();
        out.publications.insert(p.id.clone(), normalize(&w));
    }
    let authored = |r: &str| -> Vec<&Publication> {
        publications
            .iter()
            .filter(|p| p.author_ids.iter().any(|a| a == r))
            .collect()
    };
    for r in researchers {
        let parts: Vec<&Weights> = authored(&r.id)
            .iter()
            .map(|p| &out.publications[&p.id])
            .collect();
        out.researchers.insert(r.id.clone(), mean(&parts));
    }
    for u in units {
        let below = subtree(units, &u.id);
        let mut pooled: BTreeSet<String> = BTreeSet::new();
        for r in researchers
            .iter()
            .filter(|r| r.unit_ids.iter().any(|x| below.contains(x)))
        {
            pooled.extend(authored(&r.id).iter().map(|p| p.id.clone()));
        }
        let parts: Vec<&Weights> = pooled.iter().map(|p| &out.publications[p]).collect();
        out.units.insert(u.id.clone(), mean(&parts));
    }
    out
}

pub fn top_concepts(d: &Weights, tax: &TaxonomyOracle, level: u32, k: usize) -> Vec<(String, f64)> {
    let mut v: Vec<(String, f64)> = tax.rollup(d, level).into_iter().collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v.truncate(k);
    v
}

// --------------------------------------------------------------- search

#[derive(Debug, Clone)]
pub struct SearchDoc {
    pub id: String,
    pub kind: String,
    /// (field name, text); field names sort in scoring order.
    pub fields: Vec<(&'static str, String)>,
}

/// Searchable documents for a corpus, ascending by id.
pub fn search_docs(
    concepts: &[Concept],
    units: &[Unit],
    researchers: &[Researcher],
    publications: &[Publication],
) -> Vec<SearchDoc> {
    let mut docs = Vec::new();
    for c in concepts {
        docs.push(SearchDoc {
            id: c.id.clone(),
            kind: "FieldOfStudy".into(),
            fields: vec![
                ("description", c.description.clone()),
                ("name", c.name.clone()),
            ],
        });
    }
    for u in units {
        docs.push(SearchDoc {
            id: u.id.clone(),
            kind: if u.is_institution() {
                "Institution"
            } else {
                "OrgUnit"
            }
            .into(),
            fields: vec![("name", u.name.clone())],
        });
    }
    for r in researchers {
        docs.push(SearchDoc {
            id: r.id.clone(),
            kind: "Researcher".into(),
            fields: vec![("name", r.name.clone())],
        });
    }
    for p in publications {
        docs.push(SearchDoc {
            id: p.id.clone(),
            kind: "Publication".into(),
            fields: vec![
                ("abstract", p.abstract_text.clone()),
                ("title", p.title.clone()),
            ],
        });
    }
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    docs
}

/// BM25 score of every document against `query`, best first.
pub fn bm25(
    docs: &[SearchDoc],
    query: &str,
    tokenize: Tokenize,
    k1: f64,
    b: f64,
    kinds: Option<&BTreeSet<String>>,
) -> Vec<(String, f64)> {
    let tokenized: Vec<Vec<(&str, Vec<String>)>> = docs
        .iter()
        .map(|d| d.fields.iter().map(|(f, t)| (*f, tokenize(t))).collect())
        .collect();
    let mut field_docs: BTreeMap<&str, f64> = BTreeMap::new();
    let mut field_len: BTreeMap<&str, f64> = BTreeMap::new();
    for fields in &tokenized {
        for (f, toks) in fields {
            *field_docs.entry(f).or_insert(0.0) += 1.0;
            *field_len.entry(f).or_insert(0.0) += toks.len() as f64;
        }
    }
    let terms: BTreeSet<String> = tokenize(query).into_iter().collect();
    let mut scores: BTreeMap<usize, f64> = BTreeMap::new();
    for term in &terms {
        for (i, fields) in tokenized.iter().enumerate() {
            for (f, toks) in fields {
                let tf = toks.iter().filter(|t| *t == term).count() as f64;
                if tf == 0.0 {
                    continue;
                }
                if kinds.is_some_and(|k| !k.contains(&docs[i].kind)) {
                    continue;
                }
                let n = field_docs[f];
                let df = tokenized
                    .iter()
                    .filter(|fs| fs.iter().any(|(g, ts)| g == f && ts.contains(term)))
                    .count() as f64;
                let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                let avg = field_len[f] / n;
                let norm = if avg > 0.0 {
                    toks.len() as f64 / avg
                } else {
                    0.0
                };
                let part = tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * norm));
                *scores.entry(i).or_insert(0.0) += idf * part;
            }
        }
    }
    let mut ranked: Vec<(String, f64)> = scores
        .into_iter()
        .filter(|(_, s)| *s > 0.0)
        .map(|(i, s)| (docs[i].id.clone(), s))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

// ------------------------------------------------------------ recommend

/// Every other nonempty profile scored by cosine against `id`'s.
pub fn rank_by_cosine(
    id: &str,
    profiles: &BTreeMap<String, Weights>,
    k: usize,
) -> Vec<(String, f64)> {
    let query = &profiles[id];
    if query.is_empty() {
        return Vec::new();
    }
    let mut all: Vec<(String, f64)> = profiles
        .iter()
        .filter(|(other, d)| other.as_str() != id && !d.is_empty())
        .map(|(other, d)| (other.clone(), cosine(query, d)))
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Concepts ranked by Jaccard overlap of their directly tagged publications.
pub fn rank_by_jaccard(
    fos: &str,
    tags: &BTreeMap<String, Vec<(String, f64)>>,
    concept_ids: &[String],
    k: usize,
) -> Vec<(String, f64)> {
    let tagged = |f: &str| -> BTreeSet<&String> {
        tags.iter()
            .filter(|(_, ts)| ts.iter().any(|(g, _)| g == f))
            .map(|(p, _)| p)
            .collect()
    };
    let mine = tagged(fos);
    if mine.is_empty() {
        return Vec::new();
    }
    let mut all: Vec<(String, f64)> = concept_ids
        .iter()
        .filter(|g| g.as_str() != fos)
        .map(|g| {
            let theirs = tagged(g);
            let inter = mine.intersection(&theirs).count() as f64;
            let union = mine.union(&theirs).count() as f64;
            (g.clone(), if union == 0.0 { 0.0 } else { inter / union })
        })
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

// ------------------------------------------------------------ analytics

/// Fractional yearly mass per concept at `level`, zero-filled over the range.
pub fn trend_counts(
    publications: &[Publication],
    profiles: &BTreeMap<String, Weights>,
    tax: &TaxonomyOracle,
    level: u32,
    from: i64,
    to: i64,
) -> BTreeMap<String, BTreeMap<i64, f64>> {
    let mut out: BTreeMap<String, BTreeMap<i64, f64>> = BTreeMap::new();
    for p in publications {
        if p.year < from || p.year > to {
            continue;
        }
        for (f, w) in tax.rollup(&profiles[&p.id], level) {
            let years = out
                .entry(f)
                .or_insert_with(|| (from..=to).map(|y| (y, 0.0)).collect());
            *years.get_mut(&p.year).unwrap() += w;
        }
    }
    out
}

/// Closed-form least-squares slope over 0..n divided by `max(mean, 1)`.
pub fn trend_score(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let sx: f64 = (0..ys.len()).map(|i| i as f64).sum();
    let sxx: f64 = (0..ys.len()).map(|i| (i * i) as f64).sum();
    let sy: f64 = ys.iter().sum();
    let sxy: f64 = ys.iter().enumerate().map(|(i, y)| i as f64 * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    slope / (sy / n).max(1.0)
}

/// (fos, total citations, publication count) for each requested concept.
pub fn citation_totals(
    fos_ids: &[String],
    publications: &[Publication],
    profiles: &BTreeMap<String, Weights>,
    tax: &TaxonomyOracle,
) -> Vec<(String, u64, u64)> {
    fos_ids
        .iter()
        .map(|f| {
            let level = tax.level(f);
            let touching: Vec<&Publication> = publications
                .iter()
                .filter(|p| {
                    tax.rollup(&profiles[&p.id], level)
                        .get(f)
                        .is_some_and(|w| *w > 0.0)
                })
                .collect();
            (
                f.clone(),
                touching.iter().map(|p| p.citations).sum(),
                touching.len() as u64,
            )
        })
        .collect()
}

/// (root, publications, researchers, citations) for each active root.
pub fn overview(
    publications: &[Publication],
    profiles: &Profiles,
    tax: &TaxonomyOracle,
) -> Vec<(String, u64, u64, u64)> {
    let mut tiles: Vec<(String, u64, u64, u64)> = tax
        .roots()
        .into_iter()
        .map(|root| {
            let pubs: Vec<&Publication> = publications
                .iter()
                .filter(|p| {
                    tax.rollup(&profiles.publications[&p.id], 0)
                        .contains_key(&root)
                })
                .collect();
            let researchers = profiles
                .researchers
                .values()
                .filter(|d| tax.rollup(d, 0).contains_key(&root))
                .count() as u64;
            (
                root,
                pubs.len() as u64,
                researchers,
                pubs.iter().map(|p| p.citations).sum(),
            )
        })
        .filter(|t| t.1 > 0 || t.2 > 0)
        .collect();
    tiles.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    tiles
}
