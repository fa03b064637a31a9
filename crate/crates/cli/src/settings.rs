use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub snapshot: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub rejects: Option<PathBuf>,
    pub server: Option<String>,
    pub bind: Option<SocketAddr>,
    pub cors_origin: Option<String>,
    pub trend_window: Option<i64>,
    pub threshold: Option<f64>,
    pub top_k: Option<usize>,
    pub title_boost: Option<usize>,
    pub k1: Option<f64>,
    pub b: Option<f64>,
    pub stopwords: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }
}
