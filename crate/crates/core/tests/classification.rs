mod common;

use std::collections::BTreeMap;

use fosgraph_core::classifier::{Classifier, ClassifierConfig, PublicationText};
use fosgraph_core::graph::{validate_schema, EdgeKind, NodeKind};
use fosgraph_core::taxonomy::{parse_tsv, Taxonomy};
use fosgraph_core::text::Tokenizer;
use fosgraph_testkit::oracle::{self, ClassifyParams, TaxonomyOracle};
use fosgraph_testkit::Corpus;

fn engine_tags(c: &Corpus, cfg: ClassifierConfig) -> BTreeMap<String, Vec<(String, f64)>> {
    let taxonomy = Taxonomy::load(parse_tsv(&c.taxonomy_tsv).unwrap()).unwrap();
    let classifier = Classifier::new(&taxonomy, Tokenizer::default(), cfg).unwrap();
    let texts: Vec<PublicationText> = c
        .publications
        .iter()
        .map(|p| PublicationText {
            id: p.id.as_str().into(),
            title: p.title.clone(),
            abstract_text: p.abstract_text.clone(),
        })
        .collect();
    classifier
        .classify_all(&texts)
        .unwrap()
        .into_iter()
        .map(|c| {
            (
                c.publication.to_string(),
                c.tags
                    .into_iter()
                    .map(|t| (t.fos.to_string(), t.score))
                    .collect(),
            )
        })
        .collect()
}

#[test]
fn fixture_tags_equal_brute_force() {
    let c = Corpus::fixture();
    let tok = common::tokenizer();
    let expected = oracle::classify(
        &c.concepts,
        &c.publications,
        &tok,
        ClassifyParams::default(),
    );
    let got = engine_tags(&c, ClassifierConfig::default());
    assert_eq!(got, expected);
    assert!(got.values().filter(|t| !t.is_empty()).count() >= 25);
}

#[test]
fn other_configs_equal_brute_force() {
    let c = Corpus::fixture();
    let tok = common::tokenizer();
    for (threshold, top_k, title_boost) in [(0.0, 1, 1), (0.2, 3, 3), (0.01, 40, 2)] {
        let params = ClassifyParams {
            threshold,
            top_k,
            title_boost,
        };
        let cfg = ClassifierConfig {
            threshold,
            top_k,
            title_boost,
        };
        let expected = oracle::classify(&c.concepts, &c.publications, &tok, params);
        assert_eq!(engine_tags(&c, cfg), expected, "{params:?}");
    }
}

#[test]
fn concept_text_includes_child_names() {
    let c = Corpus::fixture();
    let taxonomy = Taxonomy::load(parse_tsv(&c.taxonomy_tsv).unwrap()).unwrap();
    let classifier = Classifier::new(&taxonomy, Tokenizer::default(), Default::default()).unwrap();
    let v = classifier.concept_representation(&"ml".into()).unwrap();
    for t in ["machine", "learning", "deep"] {
        assert!(v.get(t) > 0.0, "{t}");
    }
}

#[test]
fn publication_vector_equals_hand_tfidf() {
    let c = Corpus::fixture();
    let tok = common::tokenizer();
    let taxonomy = Taxonomy::load(parse_tsv(&c.taxonomy_tsv).unwrap()).unwrap();
    let classifier = Classifier::new(&taxonomy, Tokenizer::default(), Default::default()).unwrap();
    let texts: Vec<PublicationText> = c
        .publications
        .iter()
        .map(|p| PublicationText {
            id: p.id.as_str().into(),
            title: p.title.clone(),
            abstract_text: p.abstract_text.clone(),
        })
        .collect();
    let corpus = classifier.publication_corpus(&texts).unwrap();
    let docs: Vec<Vec<String>> = c
        .publications
        .iter()
        .map(|p| oracle::publication_document(p, &tok, 2))
        .collect();
    for (i, doc) in docs.iter().enumerate() {
        let expected = oracle::tfidf(doc, &docs);
        let got: oracle::Weights = corpus
            .vector(i)
            .unwrap()
            .iter()
            .map(|(t, w)| (t.to_string(), w))
            .collect();
        assert_eq!(got, expected);
    }
}

#[test]
fn ingest_tags_equal_oracle_and_schema_is_clean() {
    let (c, out) = common::fixture();
    let tok = common::tokenizer();
    let expected = oracle::classify(
        &c.concepts,
        &c.publications,
        &tok,
        ClassifyParams::default(),
    );
    let tag_count: usize = expected.values().map(Vec::len).sum();
    assert_eq!(out.report.edge_count(EdgeKind::About), tag_count);
    assert_eq!(out.report.node_count(NodeKind::OrgUnit), 3);
    assert_eq!(out.report.node_count(NodeKind::Institution), 1);
    assert_eq!(out.report.node_count(NodeKind::Researcher), 10);
    assert_eq!(out.report.node_count(NodeKind::Publication), 30);
    assert_eq!(out.report.node_count(NodeKind::FieldOfStudy), 40);
    assert!(out.report.rejected.is_empty());
    assert!(validate_schema(&out.snapshot.graph.to_snapshot()).is_empty());

    let oracle_tax = TaxonomyOracle::new(&c.concepts);
    for id in oracle_tax.ids() {
        assert_eq!(
            out.snapshot.taxonomy.level(&id.as_str().into()),
            Some(oracle_tax.level(id))
        );
    }
    assert_eq!(out.snapshot.taxonomy.max_level(), 3);
}
