use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "fosgraph",
    version,
    about = "Field-of-study knowledge graph for one institution"
)]
pub struct Cli {
    /// Key-value (TOML) file overriding built-in defaults; flags win over it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and publish a snapshot from the four input files; prints the report.
    Ingest(IngestArgs),
    /// Serve the HTTP API over a snapshot directory.
    Serve(ServeArgs),
    /// Print the classification report without committing a snapshot.
    Classify(ClassifyArgs),
    /// One-shot search; prints JSON.
    Search(SearchArgs),
    /// Trend series as CSV (`fos_id,year,count`).
    Trends(TrendsArgs),
    /// Verify a snapshot and copy it to another directory.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Directory holding taxonomy.tsv, units.ndjson, researchers.ndjson, publications.ndjson.
    #[arg(long, value_name = "DIR")]
    pub input: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub taxonomy: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub units: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub researchers: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub publications: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    /// Minimum cosine for a tag.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Maximum tags per publication.
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Times title tokens are repeated.
    #[arg(long)]
    pub title_boost: Option<usize>,
    #[arg(long)]
    pub k1: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Stopword list, one word per line.
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub build: BuildArgs,
    #[arg(long, value_name = "DIR")]
    pub snapshot: Option<PathBuf>,
    /// Where rejected lines go; defaults to `<snapshot>.rejects`.
    #[arg(long, value_name = "DIR")]
    pub rejects: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, value_name = "DIR")]
    pub snapshot: Option<PathBuf>,
    #[arg(long)]
    pub bind: Option<SocketAddr>,
    #[arg(long)]
    pub cors_origin: Option<String>,
    /// Years in the default trend window.
    #[arg(long)]
    pub trend_window: Option<i64>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Required: classification never commits.
    #[arg(long, required = true)]
    pub dry_run: bool,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub build: BuildArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    #[arg(long, value_name = "DIR", conflicts_with = "server")]
    pub snapshot: Option<PathBuf>,
    /// Query a running service instead of reading the snapshot.
    #[arg(long, value_name = "URL")]
    pub server: Option<String>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    pub query: String,
    /// Comma-separated node kinds.
    #[arg(long, default_value = "")]
    pub kinds: String,
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub offset: Option<usize>,
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Args)]
pub struct TrendsArgs {
    #[arg(long)]
    pub level: u32,
    #[arg(long)]
    pub from: Option<i64>,
    #[arg(long)]
    pub to: Option<i64>,
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_name = "DIR")]
    pub snapshot: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}
