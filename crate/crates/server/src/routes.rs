use std::str::FromStr;
use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, Method};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

use fosgraph_core::views::{self, Health, Page, Versioned};
use fosgraph_core::{NodeId, NodeKind, Snapshot};

use crate::config::ServerConfig;
use crate::error::ApiError;
use crate::state::AppState;

const MAX_K: usize = 1000;

pub fn router(state: AppState, config: &ServerConfig) -> Router {
    let origin = match config.cors_origin.as_deref() {
        None | Some("*") => AllowOrigin::any(),
        Some(o) => {
            AllowOrigin::exact(HeaderValue::from_str(o).unwrap_or(HeaderValue::from_static("null")))
        }
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET]);
    Router::new()
        .route("/health", get(health))
        .route("/search", get(search))
        .route("/fos", get(fos_roots))
        .route("/fos/{id}", get(fos))
        .route("/fos/{id}/related", get(fos_related))
        .route("/researchers/{id}", get(researcher))
        .route("/researchers/{id}/similar", get(researcher_similar))
        .route("/units/{id}", get(unit))
        .route("/units/{id}/related", get(unit_related))
        .route("/publications/{id}", get(publication))
        .route("/publications/{id}/related", get(publication_related))
        .route("/trends", get(trends))
        .route("/compare/citations", get(compare_citations))
        .route("/overview", get(overview))
        .fallback(not_found)
        .layer(cors)
        .with_state(state)
}

type Params = Result<Query<Vec<(String, String)>>, QueryRejection>;

struct Args(Vec<(String, String)>);

impl Args {
    fn from(params: Params) -> Result<Self, ApiError> {
        params
            .map(|Query(q)| Args(q))
            .map_err(|e| ApiError::bad_request(e.body_text()))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> {
        self.0
            .iter()
            .filter(move |(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, ApiError> {
        self.raw(key)
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| ApiError::bad_request(format!("invalid value `{v}` for `{key}`")))
            })
            .transpose()
    }

    fn page(&self) -> Result<Page, ApiError> {
        Ok(Page::new(self.parse("limit")?, self.parse("offset")?)?)
    }

    fn k(&self) -> Result<Option<usize>, ApiError> {
        let k = self.parse::<usize>("k")?;
        if k.is_some_and(|k| k == 0 || k > MAX_K) {
            return Err(ApiError::bad_request(format!(
                "k must be between 1 and {MAX_K}"
            )));
        }
        Ok(k)
    }
}

fn snapshot(state: &AppState) -> Result<Arc<Snapshot>, ApiError> {
    state.current().ok_or_else(ApiError::snapshot_missing)
}

fn node_id(raw: &str) -> Result<NodeId, ApiError> {
    NodeId::new(raw).map_err(|e| ApiError::bad_request(e.to_string()))
}

/// Runs `f` against the current snapshot and stamps its version on the
/// response, success or error.
fn respond<T, F>(state: &AppState, f: F) -> Response
where
    T: Serialize,
    F: FnOnce(&Snapshot) -> Result<T, ApiError>,
{
    let snap = match snapshot(state) {
        Ok(s) => s,
        Err(e) => return e.into_response(),
    };
    let version = snap.version();
    match f(&snap) {
        Ok(data) => Json(Versioned {
            snapshot_version: version,
            data,
        })
        .into_response(),
        Err(e) => e.at(version).into_response(),
    }
}

async fn health(State(state): State<AppState>) -> Response {
    respond(&state, |_| {
        Ok(Health {
            status: "ok".into(),
        })
    })
}

async fn search(State(state): State<AppState>, params: Params) -> Response {
    respond(&state, |snap| {
        let args = Args::from(params)?;
        let kinds = views::parse_kinds(args.raw("kinds").unwrap_or(""))?;
        Ok(views::search(
            snap,
            args.raw("q").unwrap_or(""),
            kinds.as_ref(),
            args.page()?,
        ))
    })
}

async fn fos_roots(State(state): State<AppState>) -> Response {
    respond(&state, |snap| Ok(views::fos_roots(snap)))
}

async fn fos(State(state): State<AppState>, Path(id): Path<String>, params: Params) -> Response {
    respond(&state, |snap| {
        let args = Args::from(params)?;
        Ok(views::fos(snap, &node_id(&id)?, args.page()?)?)
    })
}

async fn fos_related(
    State(state): State<AppState>,
    Path(id): Path<String>,
    params: Params,
) -> Response {
    respond(&state, |snap| {
        let args = Args::from(params)?;
        Ok(views::related(
            snap,
            &node_id(&id)?,
            &[NodeKind::FieldOfStudy],
            "field of study",
            args.k()?,
        )?)
    })
}

async fn researcher(
    State(state): State<AppState>,
    Path(id): Path<String>,
    params: Params,
) -> Response {
    respond(&state, |snap| {
        let args = Args::from(params)?;
        Ok(views::researcher(
            snap,
            &node_id(&id)?,
            args.parse("level")?,
            args.k()?,
            args.page()?,
        )?)
    })
}

async fn researcher_similar(
    State(state): State<AppState>,
    Path(id): Path<String>,
    params: Params,
) -> Response {
    respond(&state, |snap| {
        let args = Args::from(params)?;
        Ok(views::related(
            snap,
            &node_id(&id)?,
            &[NodeKind::Researcher],
            "researcher",
            args.k()?,
        )?)
    })
}

async fn unit(State(state): State<AppState>, Path(id): Path<String>, params: Params) -> Response {
    respond(&state, |snap| {
        let args = Args::from(params)?;
        Ok(views::unit(
            snap,
            &node_id(&id)?,
            args.parse("level")?,
            args.k()?,
            args.page()?,
        )?)
    })
}

async fn unit_related(
    State(state): State<AppState>,
    Path(id): Path<String>,
    params: Params,
) -> Response {
    respond(&state, |snap| {
        let args = Args::from(params)?;
        Ok(views::related(
            snap,
            &node_id(&id)?,
            &[NodeKind::OrgUnit, NodeKind::Institution],
            "unit",
            args.k()?,
        )?)
    })
}

async fn publication(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    respond(&state, |snap| Ok(views::publication(snap, &node_id(&id)?)?))
}

async fn publication_related(
    State(state): State<AppState>,
    Path(id): Path<String>,
    params: Params,
) -> Response {
    respond(&state, |snap| {
        let args = Args::from(params)?;
        Ok(views::related(
            snap,
            &node_id(&id)?,
            &[NodeKind::Publication],
            "publication",
            args.k()?,
        )?)
    })
}

async fn trends(State(state): State<AppState>, params: Params) -> Response {
    let window = state.trend_window;
    respond(&state, |snap| {
        let args = Args::from(params)?;
        let window = args.parse("window")?.unwrap_or(window);
        Ok(views::trends(
            snap,
            args.parse("level")?.unwrap_or(0),
            args.parse("from")?,
            args.parse("to")?,
            window,
        )?)
    })
}

async fn compare_citations(State(state): State<AppState>, params: Params) -> Response {
    respond(&state, |snap| {
        let args = Args::from(params)?;
        let ids: Vec<NodeId> = args
            .all("fos")
            .flat_map(|v| v.split(','))
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(node_id)
            .collect::<Result<_, _>>()?;
        if ids.is_empty() {
            return Err(ApiError::bad_request(
                "`fos` must list at least one concept id",
            ));
        }
        Ok(views::compare_citations(snap, &ids)?)
    })
}

async fn overview(State(state): State<AppState>) -> Response {
    respond(&state, |snap| Ok(views::overview(snap)))
}

async fn not_found(State(state): State<AppState>) -> Response {
    let mut e = ApiError::not_found("no such endpoint");
    e.snapshot_version = state.version();
    e.into_response()
}
