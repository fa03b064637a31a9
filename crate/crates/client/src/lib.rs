//! Typed async client for the fosgraph HTTP API.

use serde::de::DeserializeOwned;
use thiserror::Error;

use fosgraph_core::views::{
    CitationsView, ErrorBody, FosRootsView, FosView, Health, OverviewView, PublicationView,
    RecommendationsView, ResearcherView, SearchView, TrendsView, UnitView, Versioned,
};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("{status} {code}: {message}")]
    Api {
        status: u16,
        code: String,
        message: String,
        snapshot_version: Option<u64>,
    },
    #[error("unexpected response ({status}): {body}")]
    Unexpected { status: u16, body: String },
}

impl ClientError {
    pub fn status(&self) -> Option<u16> {
        match self {
            ClientError::Transport(e) => e.status().map(|s| s.as_u16()),
            ClientError::Api { status, .. } | ClientError::Unexpected { status, .. } => {
                Some(*status)
            }
        }
    }
}

/// Page and depth options shared by the entity endpoints.
#[derive(Debug, Clone, Copy, Default)]
pub struct EntityOptions {
    pub level: Option<u32>,
    pub k: Option<usize>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

impl EntityOptions {
    fn query(&self) -> Vec<(&'static str, String)> {
        let mut q = Vec::new();
        push(&mut q, "level", self.level);
        push(&mut q, "k", self.k);
        push(&mut q, "limit", self.limit);
        push(&mut q, "offset", self.offset);
        q
    }
}

fn push<T: ToString>(q: &mut Vec<(&'static str, String)>, key: &'static str, v: Option<T>) {
    if let Some(v) = v {
        q.push((key, v.to_string()));
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    http: reqwest::Client,
    base: String,
}

impl Client {
    pub fn new(base_url: &str) -> Self {
        Client {
            http: reqwest::Client::new(),
            base: base_url.trim_end_matches('/').to_string(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    /// Status and body bytes of any GET, without decoding.
    pub async fn get_raw(&self, path_and_query: &str) -> Result<(u16, Vec<u8>), ClientError> {
        let resp = self
            .http
            .get(format!("{}{}", self.base, path_and_query))
            .send()
            .await?;
        let status = resp.status().as_u16();
        Ok((status, resp.bytes().await?.to_vec()))
    }

    async fn get<T: DeserializeOwned>(
        &self,
        path: &str,
        query: &[(&str, String)],
    ) -> Result<Versioned<T>, ClientError> {
        let resp = self
            .http
            .get(format!("{}{}", self.base, path))
            .query(query)
            .send()
            .await?;
        let status = resp.status().as_u16();
        let bytes = resp.bytes().await?;
        if (200..300).contains(&status) {
            return decode(&bytes).ok_or_else(|| ClientError::Unexpected {
                status,
                body: String::from_utf8_lossy(&bytes).into_owned(),
            });
        }
        match serde_json::from_slice::<ErrorBody>(&bytes) {
            Ok(body) => Err(ClientError::Api {
                status,
                code: body.error.code,
                message: body.error.message,
                snapshot_version: body.snapshot_version,
            }),
            Err(_) => Err(ClientError::Unexpected {
                status,
                body: String::from_utf8_lossy(&bytes).into_owned(),
            }),
        }
    }

    pub async fn health(&self) -> Result<Versioned<Health>, ClientError> {
        self.get("/health", &[]).await
    }

    pub async fn search(
        &self,
        q: &str,
        kinds: &[&str],
        limit: Option<usize>,
        offset: Option<usize>,
    ) -> Result<Versioned<SearchView>, ClientError> {
        let mut query = vec![("q", q.to_string())];
        if !kinds.is_empty() {
            query.push(("kinds", kinds.join(",")));
        }
        push(&mut query, "limit", limit);
        push(&mut query, "offset", offset);
        self.get("/search", &query).await
    }

    pub async fn fos_roots(&self) -> Result<Versioned<FosRootsView>, ClientError> {
        self.get("/fos", &[]).await
    }

    pub async fn fos(
        &self,
        id: &str,
        opts: EntityOptions,
    ) -> Result<Versioned<FosView>, ClientError> {
        self.get(&format!("/fos/{}", segment(id)), &opts.query())
            .await
    }

    pub async fn fos_related(
        &self,
        id: &str,
        k: Option<usize>,
    ) -> Result<Versioned<RecommendationsView>, ClientError> {
        self.related(&format!("/fos/{}/related", segment(id)), k)
            .await
    }

    pub async fn researcher(
        &self,
        id: &str,
        opts: EntityOptions,
    ) -> Result<Versioned<ResearcherView>, ClientError> {
        self.get(&format!("/researchers/{}", segment(id)), &opts.query())
            .await
    }

    pub async fn similar_researchers(
        &self,
        id: &str,
        k: Option<usize>,
    ) -> Result<Versioned<RecommendationsView>, ClientError> {
        self.related(&format!("/researchers/{}/similar", segment(id)), k)
            .await
    }

    pub async fn unit(
        &self,
        id: &str,
        opts: EntityOptions,
    ) -> Result<Versioned<UnitView>, ClientError> {
        self.get(&format!("/units/{}", segment(id)), &opts.query())
            .await
    }

    pub async fn unit_related(
        &self,
        id: &str,
        k: Option<usize>,
    ) -> Result<Versioned<RecommendationsView>, ClientError> {
        self.related(&format!("/units/{}/related", segment(id)), k)
            .await
    }

    pub async fn publication(&self, id: &str) -> Result<Versioned<PublicationView>, ClientError> {
        self.get(&format!("/publications/{}", segment(id)), &[])
            .await
    }

    pub async fn publication_related(
        &self,
        id: &str,
        k: Option<usize>,
    ) -> Result<Versioned<RecommendationsView>, ClientError> {
        self.related(&format!("/publications/{}/related", segment(id)), k)
            .await
    }

    pub async fn trends(
        &self,
        level: u32,
        from: Option<i64>,
        to: Option<i64>,
    ) -> Result<Versioned<TrendsView>, ClientError> {
        let mut query = vec![("level", level.to_string())];
        push(&mut query, "from", from);
        push(&mut query, "to", to);
        self.get("/trends", &query).await
    }

    pub async fn compare_citations(
        &self,
        fos: &[&str],
    ) -> Result<Versioned<CitationsView>, ClientError> {
        self.get("/compare/citations", &[("fos", fos.join(","))])
            .await
    }

    pub async fn overview(&self) -> Result<Versioned<OverviewView>, ClientError> {
        self.get("/overview", &[]).await
    }

    async fn related(
        &self,
        path: &str,
        k: Option<usize>,
    ) -> Result<Versioned<RecommendationsView>, ClientError> {
        let mut query = Vec::new();
        push(&mut query, "k", k);
        self.get(path, &query).await
    }
}

/// Splits the version off an envelope and decodes the remaining fields.
fn decode<T: DeserializeOwned>(bytes: &[u8]) -> Option<Versioned<T>> {
    let mut value: serde_json::Value = serde_json::from_slice(bytes).ok()?;
    let version = value
        .as_object_mut()?
        .remove("snapshot_version")?
        .as_u64()?;
    Some(Versioned {
        snapshot_version: version,
        data: serde_json::from_value(value).ok()?,
    })
}

/// Percent-encodes one path segment.
fn segment(id: &str) -> String {
    let mut out = String::new();
    for b in id.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.' | b'~') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}
