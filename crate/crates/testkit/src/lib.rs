//! Test support for fosgraph: fixture readers, brute-force oracles that
//! work on plain maps and strings, and a seeded synthetic corpus.
//!
//! Nothing here depends on `fosgraph-core`; oracles recompute every
//! quantity from the raw records.

pub mod fixtures;
pub mod oracle;
pub mod synth;

pub use fixtures::{fixture_dir, Concept, Corpus, Publication, Researcher, Unit};
