//! Seeded synthetic institution for capacity tests.

use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::fixtures::Corpus;

#[derive(Debug, Clone, Copy)]
pub struct SynthParams {
    pub concepts: usize,
    pub units: usize,
    pub researchers: usize,
    pub publications: usize,
    pub first_year: i64,
    pub last_year: i64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            concepts: 2000,
            units: 40,
            researchers: 500,
            publications: 5000,
            first_year: 2005,
            last_year: 2024,
            seed: 7,
        }
    }
}

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ne", "ru", "sa", "to", "vi", "be", "do", "fe", "gu", "ha", "ji", "ko", "lu",
    "ma", "no", "pe", "qui", "ri", "su", "te", "zo",
];

fn word(i: usize) -> String {
    let mut w = String::new();
    let mut n = i;
    for _ in 0..3 {
        w.push_str(SYLLABLES[n % SYLLABLES.len()]);
        n /= SYLLABLES.len();
    }
    w
}

/// Four-level taxonomy, units, researchers and publications as file texts.
pub fn generate(p: SynthParams) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let vocab: Vec<String> = (0..(p.concepts * 3).max(100)).map(word).collect();

    // level sizes roughly 1 : 4 : 20 : 75
    let roots = (p.concepts / 100).max(1);
    let l1 = (p.concepts / 25).max(roots);
    let l2 = (p.concepts / 5).max(l1);
    let mut levels: Vec<Vec<String>> = vec![Vec::new(); 4];
    let mut tsv = String::new();
    let mut concept_words: Vec<Vec<String>> = Vec::new();
    for i in 0..p.concepts {
        let level = if i < roots {
            0
        } else if i < roots + l1 {
            1
        } else if i < roots + l1 + l2 {
            2
        } else {
            3
        };
        let id = format!("f{i:05}");
        let words: Vec<String> = (0..6)
            .map(|_| vocab.choose(&mut rng).unwrap().clone())
            .collect();
        let mut parents: Vec<String> = Vec::new();
        if level > 0 {
            let above = &levels[level - 1];
            parents.push(above.choose(&mut rng).unwrap().clone());
            if rng.random_bool(0.1) {
                let extra = above.choose(&mut rng).unwrap().clone();
                if !parents.contains(&extra) {
                    parents.push(extra);
                }
            }
        }
        writeln!(
            tsv,
            "{id}\t{} {}\t{}\t{}",
            words[0],
            words[1],
            words[2..].join(" "),
            parents.join(",")
        )
        .unwrap();
        levels[level].push(id);
        concept_words.push(words);
    }

    let mut units = String::new();
    writeln!(
        units,
        "{}",
        json!({"id": "inst", "name": "Synthetic Institute", "kind": "Institution"})
    )
    .unwrap();
    let mut unit_ids = vec!["inst".to_string()];
    for i in 0..p.units {
        let id = format!("u{i:03}");
        let parent = unit_ids[rng.random_range(0..unit_ids.len())].clone();
        writeln!(
            units,
            "{}",
            json!({"id": id, "name": format!("Unit {}", word(i)), "unit_type": "group", "parent_id": parent})
        )
        .unwrap();
        unit_ids.push(id);
    }

    let mut researchers = String::new();
    for i in 0..p.researchers {
        let unit =
            unit_ids[1 + rng.random_range(0..p.units.max(1)).min(unit_ids.len() - 2)].clone();
        writeln!(
            researchers,
            "{}",
            json!({"id": format!("r{i:04}"), "name": format!("{} {}", word(i + 7), word(i * 13 + 1)), "unit_ids": [unit]})
        )
        .unwrap();
    }

    let mut publications = String::new();
    for i in 0..p.publications {
        let topic = rng.random_range(0..p.concepts);
        let words = &concept_words[topic];
        let mut title: Vec<&str> = words[..2].iter().map(String::as_str).collect();
        title.push(vocab.choose(&mut rng).unwrap());
        let mut abstract_words: Vec<&str> = words.iter().map(String::as_str).collect();
        for _ in 0..20 {
            abstract_words.push(vocab.choose(&mut rng).unwrap());
        }
        let n_authors = rng.random_range(1..=3);
        let authors: Vec<String> = (0..n_authors)
            .map(|_| format!("r{:04}", rng.random_range(0..p.researchers)))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        writeln!(
            publications,
            "{}",
            json!({
                "id": format!("p{i:05}"),
                "title": title.join(" "),
                "abstract": abstract_words.join(" "),
                "year": rng.random_range(p.first_year..=p.last_year),
                "citations": rng.random_range(0..200),
                "author_ids": authors,
            })
        )
        .unwrap();
    }

    Corpus::from_texts(&tsv, &units, &researchers, &publications)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_determinism() {
        let small = SynthParams {
            concepts: 200,
            units: 5,
            researchers: 20,
            publications: 50,
            ..Default::default()
        };
        let a = generate(small);
        let b = generate(small);
        assert_eq!(a.publications_ndjson, b.publications_ndjson);
        assert_eq!(a.concepts.len(), 200);
        assert_eq!(a.units.len(), 6);
        assert_eq!(a.researchers.len(), 20);
        assert_eq!(a.publications.len(), 50);
        assert!(a.concepts.iter().filter(|c| c.parents.is_empty()).count() >= 1);
    }
}
