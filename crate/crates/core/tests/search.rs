mod common;

use std::collections::BTreeSet;

use fosgraph_core::NodeKind;
use fosgraph_testkit::oracle;
use fosgraph_testkit::Corpus;

pub const QUERIES: [&str; 20] = [
    "graph neural",
    "knowledge graph",
    "deep learning",
    "climate change",
    "memory attention brain",
    "quantum",
    "genome sequencing",
    "Graph Databases",
    "recommendation users",
    "language models",
    "Ada Brandt",
    "department",
    "software testing quality",
    "wages inequality automation",
    "retrieval of relevant documents",
    "neural neural networks",
    "CRISPR",
    "the and of",
    "",
    "zebra unicorn",
];

fn check(c: &Corpus, query: &str, kinds: Option<&BTreeSet<NodeKind>>) {
    let out = common::ingest(c);
    let tok = common::tokenizer();
    let docs = oracle::search_docs(&c.concepts, &c.units, &c.researchers, &c.publications);
    let kind_names: Option<BTreeSet<String>> =
        kinds.map(|ks| ks.iter().map(|k| k.as_str().to_string()).collect());
    let want = oracle::bm25(&docs, query, &tok, 1.2, 0.75, kind_names.as_ref());
    let got: Vec<(String, f64)> = out
        .snapshot
        .index
        .lookup(query, kinds, usize::MAX, 0)
        .into_iter()
        .map(|h| (h.node.to_string(), h.score))
        .collect();
    assert_eq!(got, want, "query {query:?}");
}

#[test]
fn scripted_queries_equal_brute_force_bm25() {
    let c = Corpus::fixture();
    for q in QUERIES {
        check(&c, q, None);
    }
}

#[test]
fn kind_filtered_queries_equal_brute_force_bm25() {
    let c = Corpus::fixture();
    let pubs: BTreeSet<NodeKind> = [NodeKind::Publication].into();
    let people: BTreeSet<NodeKind> = [NodeKind::Researcher, NodeKind::FieldOfStudy].into();
    for q in QUERIES {
        check(&c, q, Some(&pubs));
        check(&c, q, Some(&people));
    }
}

#[test]
fn ten_document_corpus() {
    let full = Corpus::fixture();
    let ten: Vec<&str> = full.publications_ndjson.lines().take(10).collect();
    let c = Corpus::from_texts(
        &full.taxonomy_tsv,
        &full.units_ndjson,
        &full.researchers_ndjson,
        &(ten.join("\n") + "\n"),
    );
    assert_eq!(c.publications.len(), 10);
    check(&c, "graph neural", None);
    check(&c, "graph neural", Some(&[NodeKind::Publication].into()));
}

#[test]
fn pagination_is_a_window_of_the_ranking() {
    let (_, out) = common::fixture();
    let all = out.snapshot.index.lookup("graph", None, usize::MAX, 0);
    assert!(all.len() > 6);
    let page = out.snapshot.index.lookup("graph", None, 3, 2);
    assert_eq!(page, all[2..5].to_vec());
    assert!(out
        .snapshot
        .index
        .lookup("graph", None, 5, all.len())
        .is_empty());
}
