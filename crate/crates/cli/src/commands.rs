use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fosgraph_client::Client;
use fosgraph_core::classifier::{write_report, ClassifierConfig};
use fosgraph_core::ingest::{ingest_texts, write_rejects, CorpusPaths, IngestOutcome};
use fosgraph_core::search::IndexConfig;
use fosgraph_core::store::{load_snapshot, read_version, save_snapshot, WriterLock};
use fosgraph_core::text::Tokenizer;
use fosgraph_core::views::{self, Page, TrendsView, Versioned};
use fosgraph_core::{BuildConfig, Snapshot};
use fosgraph_server::{Server, ServerConfig};

use crate::args::{
    BuildArgs, ClassifyArgs, Cli, Command, ExportArgs, IngestArgs, InputArgs, SearchArgs,
    ServeArgs, SourceArgs, TrendsArgs,
};
use crate::settings::FileConfig;

/// Bad flag combinations detected after parsing; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn run(cli: Cli) -> Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(a) => ingest(a, &file),
        Command::Serve(a) => serve(a, &file),
        Command::Classify(a) => classify(a, &file),
        Command::Search(a) => search(a, &file),
        Command::Trends(a) => trends(a, &file),
        Command::Export(a) => export(a, &file),
    }
}

fn snapshot_dir(flag: Option<PathBuf>, file: &FileConfig) -> Result<PathBuf> {
    flag.or_else(|| file.snapshot.clone())
        .ok_or_else(|| usage("--snapshot is required"))
}

fn corpus_paths(input: &InputArgs, file: &FileConfig) -> Result<CorpusPaths> {
    let dir = input.input.clone().or_else(|| file.input.clone());
    let base = dir.as_deref().map(CorpusPaths::in_dir);
    let pick = |flag: &Option<PathBuf>, from_dir: Option<PathBuf>, name: &str| {
        flag.clone()
            .or(from_dir)
            .ok_or_else(|| usage(format!("--{name} or --input is required")))
    };
    Ok(CorpusPaths {
        taxonomy: pick(
            &input.taxonomy,
            base.as_ref().map(|b| b.taxonomy.clone()),
            "taxonomy",
        )?,
        units: pick(
            &input.units,
            base.as_ref().map(|b| b.units.clone()),
            "units",
        )?,
        researchers: pick(
            &input.researchers,
            base.as_ref().map(|b| b.researchers.clone()),
            "researchers",
        )?,
        publications: pick(
            &input.publications,
            base.as_ref().map(|b| b.publications.clone()),
            "publications",
        )?,
    })
}

fn build_config(a: &BuildArgs, file: &FileConfig) -> Result<BuildConfig> {
    let defaults = ClassifierConfig::default();
    let classifier = ClassifierConfig {
        threshold: a.threshold.or(file.threshold).unwrap_or(defaults.threshold),
        top_k: a.top_k.or(file.top_k).unwrap_or(defaults.top_k),
        title_boost: a
            .title_boost
            .or(file.title_boost)
            .unwrap_or(defaults.title_boost),
    };
    classifier.validate().map_err(|e| usage(e.to_string()))?;
    let idx_defaults = IndexConfig::default();
    let index = IndexConfig {
        k1: a.k1.or(file.k1).unwrap_or(idx_defaults.k1),
        b: a.b.or(file.b).unwrap_or(idx_defaults.b),
    };
    index.validate().map_err(|e| usage(e.to_string()))?;
    let tokenizer = match a.stopwords.as_ref().or(file.stopwords.as_ref()) {
        Some(path) => Tokenizer::from_stopword_file(path)?,
        None => Tokenizer::default(),
    };
    Ok(BuildConfig {
        classifier,
        index,
        tokenizer,
    })
}

fn run_pipeline(
    input: &InputArgs,
    build: &BuildArgs,
    file: &FileConfig,
    version: u64,
) -> Result<IngestOutcome> {
    let paths = corpus_paths(input, file)?;
    let config = build_config(build, file)?;
    let texts = paths.read()?;
    Ok(ingest_texts(&texts, &config, version)?)
}

fn default_rejects_dir(snapshot: &Path) -> PathBuf {
    let mut name = snapshot
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| "snapshot".into());
    name.push(".rejects");
    snapshot.with_file_name(name)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn ingest(a: IngestArgs, file: &FileConfig) -> Result<()> {
    let dir = snapshot_dir(a.snapshot, file)?;
    let _lock = WriterLock::acquire(&dir)?;
    let version = read_version(&dir)?.unwrap_or(0) + 1;
    let outcome = run_pipeline(&a.input, &a.build, file, version)?;
    if !outcome.rejects.is_empty() {
        let rejects = a
            .rejects
            .or_else(|| file.rejects.clone())
            .unwrap_or_else(|| default_rejects_dir(&dir));
        write_rejects(&rejects, &outcome.rejects)
            .with_context(|| format!("cannot write rejects to {}", rejects.display()))?;
        eprintln!(
            "{} records rejected, see {}",
            outcome.report.rejected.len(),
            rejects.display()
        );
    }
    save_snapshot(&outcome.snapshot, &dir)?;
    print_json(&outcome.report)
}

fn classify(a: ClassifyArgs, file: &FileConfig) -> Result<()> {
    debug_assert!(a.dry_run);
    let outcome = run_pipeline(&a.input, &a.build, file, 0)?;
    let config = outcome.snapshot.config.classifier;
    let records: Vec<_> = outcome
        .classifications
        .into_iter()
        .map(|c| fosgraph_core::classifier::ReportRecord {
            publication: c.publication,
            tags: c.tags.into_iter().map(|t| (t.fos, t.score)).collect(),
            config,
        })
        .collect();
    let out = io::stdout().lock();
    write_report(io::BufWriter::new(out), &records)?;
    Ok(())
}

fn serve(a: ServeArgs, file: &FileConfig) -> Result<()> {
    tracing_subscriber::fmt().with_writer(io::stderr).init();
    let mut config = ServerConfig::default().with_env().map_err(usage)?;
    if let Some(dir) = a.snapshot.or_else(|| file.snapshot.clone()) {
        config.snapshot_dir = dir;
    }
    if let Some(bind) = a.bind.or(file.bind) {
        config.bind = bind;
    }
    if let Some(origin) = a.cors_origin.or_else(|| file.cors_origin.clone()) {
        config.cors_origin = Some(origin);
    }
    if let Some(w) = a.trend_window.or(file.trend_window) {
        config.trend_window = w;
    }
    config.validate().map_err(usage)?;
    runtime()?.block_on(async move {
        let server = Server::bind(config).await?;
        server.run().await?;
        Ok(())
    })
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?)
}

enum Source {
    Local(PathBuf),
    Remote(Client),
}

fn source(a: SourceArgs, file: &FileConfig) -> Result<Source> {
    if let Some(url) = a.server {
        return Ok(Source::Remote(Client::new(&url)));
    }
    if let Some(dir) = a.snapshot {
        return Ok(Source::Local(dir));
    }
    if let Some(url) = &file.server {
        return Ok(Source::Remote(Client::new(url)));
    }
    Ok(Source::Local(snapshot_dir(None, file).map_err(|_| {
        usage("--snapshot or --server is required")
    })?))
}

fn load(dir: &Path) -> Result<Snapshot> {
    load_snapshot(dir).with_context(|| format!("cannot load snapshot from {}", dir.display()))
}

fn search(a: SearchArgs, file: &FileConfig) -> Result<()> {
    let result = match source(a.source, file)? {
        Source::Local(dir) => {
            let snap = load(&dir)?;
            let kinds = views::parse_kinds(&a.kinds).map_err(|e| usage(e.to_string()))?;
            let page = Page::new(a.limit, a.offset).map_err(|e| usage(e.to_string()))?;
            Versioned {
                snapshot_version: snap.version(),
                data: views::search(&snap, &a.query, kinds.as_ref(), page),
            }
        }
        Source::Remote(client) => {
            let kinds: Vec<&str> = a
                .kinds
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            runtime()?.block_on(client.search(&a.query, &kinds, a.limit, a.offset))?
        }
    };
    print_json(&result)
}

fn trends(a: TrendsArgs, file: &FileConfig) -> Result<()> {
    let view: TrendsView = match source(a.source, file)? {
        Source::Local(dir) => {
            let snap = load(&dir)?;
            let window = file
                .trend_window
                .unwrap_or(ServerConfig::default().trend_window);
            views::trends(&snap, a.level, a.from, a.to, window).map_err(|e| usage(e.to_string()))?
        }
        Source::Remote(client) => {
            runtime()?
                .block_on(client.trends(a.level, a.from, a.to))?
                .data
        }
    };
    let mut out = io::BufWriter::new(io::stdout().lock());
    writeln!(out, "fos_id,year,count")?;
    for s in &view.series {
        for (year, count) in &s.counts {
            writeln!(out, "{},{},{}", s.fos, year, count)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn export(a: ExportArgs, file: &FileConfig) -> Result<()> {
    let dir = snapshot_dir(a.snapshot, file)?;
    let snap = load(&dir)?;
    if a.out == dir {
        bail!("--out must differ from the snapshot directory");
    }
    let _lock = WriterLock::acquire(&a.out)?;
    save_snapshot(&snap, &a.out)?;
    eprintln!(
        "exported snapshot version {} to {}",
        snap.version(),
        a.out.display()
    );
    Ok(())
}
