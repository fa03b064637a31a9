mod common;

use std::collections::BTreeSet;

use fosgraph_core::classifier::{Classifier, ClassifierConfig, PublicationText};
use fosgraph_core::graph::{Direction, EdgeKind, GraphBuilder, NodeKind, Props};
use fosgraph_core::taxonomy::{parse_tsv, Taxonomy, TaxonomyRecord};
use fosgraph_core::text::{cosine, TermVector, Tokenizer};
use fosgraph_core::{NodeId, TopicDistribution};
use fosgraph_testkit::Corpus;
use proptest::prelude::*;

fn fixture_taxonomy() -> Taxonomy {
    Taxonomy::load(parse_tsv(&Corpus::fixture().taxonomy_tsv).unwrap()).unwrap()
}

fn term_vector() -> impl Strategy<Value = TermVector> {
    prop::collection::btree_map("[a-e]", 0.01f64..10.0, 0..5)
        .prop_map(|m| TermVector::from_weights(m.into_iter()))
}

fn fixture_distribution() -> impl Strategy<Value = Vec<(usize, f64)>> {
    prop::collection::vec((0usize..40, 0.001f64..1.0), 1..10)
}

proptest! {
    #[test]
    fn cosine_symmetric_bounded_scale_free(a in term_vector(), b in term_vector(), s in 0.1f64..50.0) {
        let ab = cosine(&a, &b);
        prop_assert_eq!(ab, cosine(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((cosine(&a.scaled(s), &b) - ab).abs() < 1e-12);
        if !a.is_empty() {
            prop_assert!((cosine(&a, &a) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn neighbors_are_symmetric(edges in prop::collection::btree_set((0usize..6, 0usize..6), 0..20)) {
        let mut b = GraphBuilder::new();
        for i in 0..6 {
            b.add_node(NodeKind::FieldOfStudy, NodeId::from(format!("f{i}").as_str()), Props::new()).unwrap();
        }
        for (s, d) in &edges {
            let _ = b.add_edge(&format!("f{s}").as_str().into(), EdgeKind::ChildOf, &format!("f{d}").as_str().into(), Props::new());
        }
        let g = b.commit(1);
        for n in g.nodes() {
            for (m, _) in g.neighbors(&n.id, EdgeKind::ChildOf, Direction::Out).unwrap() {
                let back: Vec<&NodeId> = g.neighbors(m, EdgeKind::ChildOf, Direction::In).unwrap().into_iter().map(|x| x.0).collect();
                prop_assert!(back.contains(&&n.id));
            }
        }
    }

    #[test]
    fn rollup_conserves_kept_mass(raw in fixture_distribution(), level in 0u32..4) {
        let tax = fixture_taxonomy();
        let ids: Vec<NodeId> = tax.concepts().map(|c| c.id.clone()).collect();
        let d: TopicDistribution = raw.iter().map(|(i, w)| (ids[*i].clone(), *w)).collect();
        let r = tax.rollup(&d, level);
        let kept: f64 = d.iter().filter(|(f, _)| tax.level(f).unwrap() >= level).map(|(_, w)| w).sum();
        prop_assert!((r.total_mass() - kept).abs() < 1e-9);
        prop_assert!(r.distribution.iter().all(|(f, _)| tax.level(f) == Some(level)));
        if !r.distribution.is_empty() {
            prop_assert!((r.distribution.total() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rollup_at_own_level_is_identity(raw in prop::collection::vec((0usize..8, 0.01f64..1.0), 1..6)) {
        let tax = fixture_taxonomy();
        let leaves: Vec<NodeId> = tax.concepts_at_level(3).map(|c| c.id.clone()).collect();
        let d: TopicDistribution = raw.iter().map(|(i, w)| (leaves[*i % leaves.len()].clone(), *w)).collect();
        let r = tax.rollup_distribution(&d, 3);
        for (f, w) in d.iter() {
            prop_assert!((r.get(f) - w).abs() < 1e-12);
        }
    }

    #[test]
    fn raising_threshold_only_removes_tags(t1 in 0.0f64..0.5, t2 in 0.0f64..0.5) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let corpus = Corpus::fixture();
        let tax = fixture_taxonomy();
        let texts: Vec<PublicationText> = corpus.publications.iter().map(|p| PublicationText {
            id: p.id.as_str().into(),
            title: p.title.clone(),
            abstract_text: p.abstract_text.clone(),
        }).collect();
        let run = |threshold| {
            let cfg = ClassifierConfig { threshold, ..Default::default() };
            Classifier::new(&tax, Tokenizer::default(), cfg).unwrap().classify_all(&texts).unwrap()
        };
        for (a, b) in run(lo).iter().zip(run(hi).iter()) {
            let low: BTreeSet<&NodeId> = a.tags.iter().map(|t| &t.fos).collect();
            prop_assert!(b.tags.iter().all(|t| low.contains(&t.fos)));
            prop_assert!(b.tags.iter().all(|t| t.score > hi));
        }
    }

    #[test]
    fn top_k_is_a_prefix(k1 in 1usize..8, k2 in 1usize..8) {
        let (small, large) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let corpus = Corpus::fixture();
        let tax = fixture_taxonomy();
        let texts: Vec<PublicationText> = corpus.publications.iter().map(|p| PublicationText {
            id: p.id.as_str().into(),
            title: p.title.clone(),
            abstract_text: p.abstract_text.clone(),
        }).collect();
        let run = |top_k| {
            let cfg = ClassifierConfig { top_k, ..Default::default() };
            Classifier::new(&tax, Tokenizer::default(), cfg).unwrap().classify_all(&texts).unwrap()
        };
        for (a, b) in run(small).iter().zip(run(large).iter()) {
            prop_assert_eq!(&a.tags[..], &b.tags[..a.tags.len()]);
        }
    }

    #[test]
    fn taxonomy_load_is_order_independent(seed in 0u64..1000) {
        let c = Corpus::fixture();
        let shuffled = c.shuffled(seed);
        let a = fixture_taxonomy();
        let b = Taxonomy::load(parse_tsv(&shuffled.taxonomy_tsv).unwrap()).unwrap();
        prop_assert!(a == b);
    }

    #[test]
    fn mean_is_normalized(parts in prop::collection::vec(prop::collection::btree_map("[a-f]", 0.01f64..1.0, 0..4), 0..6)) {
        let dists: Vec<TopicDistribution> = parts.iter()
            .map(|m| m.iter().map(|(k, v)| (NodeId::from(k.as_str()), *v)).collect())
            .collect();
        let m = TopicDistribution::mean(&dists);
        if dists.iter().all(|d| d.is_empty()) {
            prop_assert!(m.is_empty());
        } else {
            prop_assert!((m.total() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn planted_two_cycle_rejected() {
    let rec = |id: &str, parents: &[&str]| TaxonomyRecord {
        id: id.into(),
        name: id.into(),
        description: String::new(),
        parents: parents.iter().map(|p| NodeId::from(*p)).collect(),
    };
    let mut records = parse_tsv(&Corpus::fixture().taxonomy_tsv).unwrap();
    records.push(rec("x", &["y"]));
    records.push(rec("y", &["x"]));
    assert!(matches!(
        Taxonomy::load(records),
        Err(fosgraph_core::taxonomy::TaxonomyError::CycleDetected(_))
    ));
}
