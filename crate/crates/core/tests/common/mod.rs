#![allow(dead_code)]

use std::collections::BTreeMap;

use fosgraph_core::ingest::{ingest_texts, CorpusTexts, IngestOutcome};
use fosgraph_core::text::Tokenizer;
use fosgraph_core::{BuildConfig, NodeId, TopicDistribution};
use fosgraph_testkit::oracle::Weights;
use fosgraph_testkit::Corpus;

pub fn texts(c: &Corpus) -> CorpusTexts {
    CorpusTexts {
        taxonomy: c.taxonomy_tsv.clone(),
        units: c.units_ndjson.clone(),
        researchers: c.researchers_ndjson.clone(),
        publications: c.publications_ndjson.clone(),
    }
}

pub fn ingest(c: &Corpus) -> IngestOutcome {
    ingest_texts(&texts(c), &BuildConfig::default(), 1).expect("fixture ingests")
}

pub fn fixture() -> (Corpus, IngestOutcome) {
    let c = Corpus::fixture();
    let out = ingest(&c);
    (c, out)
}

pub fn tokenizer() -> impl Fn(&str) -> Vec<String> {
    let t = Tokenizer::default();
    move |s: &str| t.tokenize(s)
}

pub fn weights(d: &TopicDistribution) -> Weights {
    d.iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn weights_map(m: &BTreeMap<NodeId, TopicDistribution>) -> BTreeMap<String, Weights> {
    m.iter().map(|(k, d)| (k.to_string(), weights(d))).collect()
}

pub fn assert_close(a: &Weights, b: &Weights, tol: f64, what: &str) {
    assert_eq!(
        a.keys().collect::<Vec<_>>(),
        b.keys().collect::<Vec<_>>(),
        "{what}: support differs"
    );
    for (k, x) in a {
        assert!((x - b[k]).abs() <= tol, "{what}: {k} {x} vs {}", b[k]);
    }
}
