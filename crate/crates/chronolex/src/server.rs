//! Read-only HTTP JSON API over a loaded index, plus the static UI bundle.

use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use chronolex_core::query::{QueryError, QueryOptions, QueryRequest};
use chronolex_core::{run_query, TemporalIndex};
use serde::Serialize;

use crate::render::{parse_word_list, response_json};
use crate::store::{Manifest, FORMAT_VERSION};

const FALLBACK_PAGE: &str = include_str!("../static/index.html");

pub struct AppState {
    index: TemporalIndex,
    options: QueryOptions,
    meta: String,
    ui_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct Meta<'a> {
    format_version: u32,
    operator: &'a str,
    n: usize,
    dim: usize,
    dim_out: usize,
    slices: chronolex_core::TimeSliceConfig,
    slice_count: usize,
    slice_labels: Vec<String>,
    entry_count: usize,
    vocabulary_size: usize,
}

impl AppState {
    pub fn new(index: TemporalIndex, options: QueryOptions, ui_dir: Option<PathBuf>) -> Self {
        let manifest = Manifest::for_index(&index);
        let meta = Meta {
            format_version: FORMAT_VERSION,
            operator: manifest.operator.as_str(),
            n: manifest.n,
            dim: manifest.dim,
            dim_out: manifest.dim_out,
            slices: manifest.slices,
            slice_count: index.slice_count(),
            slice_labels: index.config().labels(),
            entry_count: manifest.entry_count,
            vocabulary_size: index.vocabulary_size(),
        };
        let meta = serde_json::to_string(&meta).expect("meta serializes");
        AppState { index, options, meta, ui_dir }
    }

    pub fn index(&self) -> &TemporalIndex {
        &self.index
    }
}

fn json_body(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_body(status: StatusCode, message: impl std::fmt::Display) -> Response {
    json_body(status, serde_json::json!({ "error": message.to_string() }).to_string())
}

async fn meta(State(state): State<Arc<AppState>>) -> Response {
    json_body(StatusCode::OK, state.meta.clone())
}

fn parse_flag(value: &str) -> Option<bool> {
    match value {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

/// Builds a request from query-string pairs; `Err` carries the 400 message.
pub fn request_from_params(params: &[(String, String)]) -> Result<QueryRequest, String> {
    let mut words = None;
    let mut frames = false;
    let (mut width, mut height) = (None, None);
    for (key, value) in params {
        match key.as_str() {
            "words" => words = Some(parse_word_list(value)),
            "frames" => frames = parse_flag(value).ok_or_else(|| format!("invalid frames value {value:?}"))?,
            "width" => width = Some(value.parse::<u32>().map_err(|_| format!("invalid width {value:?}"))?),
            "height" => height = Some(value.parse::<u32>().map_err(|_| format!("invalid height {value:?}"))?),
            _ => {}
        }
    }
    let words = words.ok_or_else(|| "missing required parameter: words".to_string())?;
    let mut request = QueryRequest::new(words).with_frames(frames);
    match (width, height) {
        (None, None) => {}
        (Some(w), Some(h)) => request = request.with_grid(w, h),
        _ => return Err("width and height must be given together".to_string()),
    }
    Ok(request)
}

async fn projection(State(state): State<Arc<AppState>>, Query(params): Query<Vec<(String, String)>>) -> Response {
    let request = match request_from_params(&params) {
        Ok(r) => r,
        Err(message) => return error_body(StatusCode::BAD_REQUEST, message),
    };
    let worker = Arc::clone(&state);
    let result = tokio::task::spawn_blocking(move || run_query(&worker.index, &request, &worker.options)).await;
    match result {
        Ok(Ok(response)) => json_body(StatusCode::OK, response_json(&response)),
        Ok(Err(err @ QueryError::AllPointsMissing)) => error_body(StatusCode::UNPROCESSABLE_ENTITY, err),
        Ok(Err(err @ QueryError::Projection(_))) => error_body(StatusCode::INTERNAL_SERVER_ERROR, err),
        Ok(Err(err)) => error_body(StatusCode::BAD_REQUEST, err),
        Err(join) => error_body(StatusCode::INTERNAL_SERVER_ERROR, join),
    }
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json" | "map") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        Some("ico") => "image/x-icon",
        _ => "application/octet-stream",
    }
}

async fn static_files(State(state): State<Arc<AppState>>, uri: Uri) -> Response {
    let rel = uri.path().trim_start_matches('/');
    if rel.starts_with("api/") {
        return error_body(StatusCode::NOT_FOUND, "no such endpoint");
    }
    let rel = if rel.is_empty() { "index.html" } else { rel };
    let rel_path = Path::new(rel);
    if rel_path.components().any(|c| !matches!(c, Component::Normal(_))) {
        return error_body(StatusCode::NOT_FOUND, "not found");
    }
    if let Some(dir) = &state.ui_dir {
        let path = dir.join(rel_path);
        if let Ok(bytes) = tokio::fs::read(&path).await {
            return (StatusCode::OK, [(header::CONTENT_TYPE, content_type(&path))], bytes).into_response();
        }
    }
    if rel == "index.html" {
        return (StatusCode::OK, [(header::CONTENT_TYPE, "text/html; charset=utf-8")], FALLBACK_PAGE).into_response();
    }
    error_body(StatusCode::NOT_FOUND, "not found")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/v1/meta", get(meta))
        .route("/api/v1/projection", get(projection))
        .fallback(get(static_files))
        .with_state(state)
}

#[derive(Debug, thiserror::Error)]
#[error("cannot bind {addr}: {source}")]
pub struct BindFailure {
    pub addr: SocketAddr,
    #[source]
    pub source: std::io::Error,
}

/// Binds `addr` and serves until the process is interrupted.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> Result<(), std::io::Error> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| std::io::Error::new(source.kind(), BindFailure { addr, source }))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn params_to_request() {
        let r = request_from_params(&pairs(&[("words", "a,b"), ("frames", "true")])).unwrap();
        assert_eq!(r.words, ["a", "b"]);
        assert!(r.include_frames);
        assert!(request_from_params(&pairs(&[("frames", "true")])).is_err());
        assert!(request_from_params(&pairs(&[("words", "a"), ("frames", "maybe")])).is_err());
        assert!(request_from_params(&pairs(&[("words", "a"), ("width", "10")])).is_err());
        let r = request_from_params(&pairs(&[("words", "a"), ("width", "10"), ("height", "20")])).unwrap();
        assert_eq!(r.grid, Some((10, 20)));
    }
}
