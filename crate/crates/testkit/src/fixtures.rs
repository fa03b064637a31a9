use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

/// The bundled fixture corpus shipped with `fosgraph-core`.
pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Concept {
    pub id: String,
    pub name: String,
    pub description: String,
    pub parents: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Unit {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub unit_type: Option<String>,
    #[serde(default)]
    pub parent_id: Option<String>,
    #[serde(default)]
    pub kind: Option<String>,
}

impl Unit {
    pub fn is_institution(&self) -> bool {
        self.kind.as_deref() == Some("Institution")
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Researcher {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub unit_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Publication {
    pub id: String,
    pub title: String,
    #[serde(rename = "abstract", default)]
    pub abstract_text: String,
    pub year: i64,
    #[serde(default)]
    pub citations: u64,
    #[serde(default)]
    pub author_ids: Vec<String>,
}

/// Raw file contents plus the parsed records.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub taxonomy_tsv: String,
    pub units_ndjson: String,
    pub researchers_ndjson: String,
    pub publications_ndjson: String,
    pub concepts: Vec<Concept>,
    pub units: Vec<Unit>,
    pub researchers: Vec<Researcher>,
    pub publications: Vec<Publication>,
}

pub fn parse_concepts(tsv: &str) -> Vec<Concept> {
    tsv.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            Concept {
                id: cols[0].trim().to_string(),
                name: cols[1].trim().to_string(),
                description: cols[2].trim().to_string(),
                parents: cols
                    .get(3)
                    .map(|p| {
                        p.split(',')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(String::from)
                            .collect()
                    })
                    .unwrap_or_default(),
            }
        })
        .collect()
}

fn parse_lines<T: for<'de> Deserialize<'de>>(text: &str) -> Vec<T> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("bad fixture line {l}: {e}")))
        .collect()
}

impl Corpus {
    pub fn from_texts(taxonomy: &str, units: &str, researchers: &str, publications: &str) -> Self {
        Corpus {
            concepts: parse_concepts(taxonomy),
            units: parse_lines(units),
            researchers: parse_lines(researchers),
            publications: parse_lines(publications),
            taxonomy_tsv: taxonomy.to_string(),
            units_ndjson: units.to_string(),
            researchers_ndjson: researchers.to_string(),
            publications_ndjson: publications.to_string(),
        }
    }

    pub fn read(dir: &Path) -> Self {
        let read = |name: &str| {
            fs::read_to_string(dir.join(name))
                .unwrap_or_else(|e| panic!("cannot read {}: {e}", dir.join(name).display()))
        };
        Self::from_texts(
            &read("taxonomy.tsv"),
            &read("units.ndjson"),
            &read("researchers.ndjson"),
            &read("publications.ndjson"),
        )
    }

    pub fn fixture() -> Self {
        Self::read(&fixture_dir())
    }

    /// Writes the four input files into `dir`.
    pub fn write_to(&self, dir: &Path) {
        fs::create_dir_all(dir).unwrap();
        fs::write(dir.join("taxonomy.tsv"), &self.taxonomy_tsv).unwrap();
        fs::write(dir.join("units.ndjson"), &self.units_ndjson).unwrap();
        fs::write(dir.join("researchers.ndjson"), &self.researchers_ndjson).unwrap();
        fs::write(dir.join("publications.ndjson"), &self.publications_ndjson).unwrap();
    }

    /// Same records with the lines of every file permuted.
    pub fn shuffled(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut shuffle = |text: &str| {
            let mut lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
            lines.shuffle(&mut rng);
            let mut out = lines.join("\n");
            out.push('\n');
            out
        };
        let t = shuffle(&self.taxonomy_tsv);
        let u = shuffle(&self.units_ndjson);
        let r = shuffle(&self.researchers_ndjson);
        let p = shuffle(&self.publications_ndjson);
        Self::from_texts(&t, &u, &r, &p)
    }
}
