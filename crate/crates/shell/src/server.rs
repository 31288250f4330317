//! HTTP session service for walkthrough clients.

use std::collections::BTreeSet;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::header::{CACHE_CONTROL, CONTENT_TYPE, ETAG, IF_NONE_MATCH};
use axum::http::{HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use lawmap_core::dsl::to_json_value;
use lawmap_core::render::{emit_svg, layout};
use lawmap_core::{Mode, Route};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::catalog::{Catalog, MapEntry};
use crate::error::ApiError;
use crate::session::{Session, SessionStore};

#[derive(Clone)]
pub struct AppState {
    pub catalog: Arc<Catalog>,
    pub sessions: Arc<SessionStore>,
}

impl AppState {
    pub fn new(catalog: Catalog, sessions: SessionStore) -> Self {
        AppState {
            catalog: Arc::new(catalog),
            sessions: Arc::new(sessions),
        }
    }

    fn map(&self, id: &str) -> Result<Arc<MapEntry>, ApiError> {
        self.catalog.get(id).ok_or_else(|| ApiError::map_not_found(id))
    }

    fn session(&self, id: &str) -> Result<(Session, Arc<MapEntry>), ApiError> {
        let s = self.sessions.snapshot(id).ok_or_else(|| ApiError::session_not_found(id))?;
        let map = self.catalog.get(&s.map_id).ok_or_else(|| ApiError::internal(format!("session map '{}' is gone", s.map_id)))?;
        Ok((s, map))
    }
}

/// Builds the router. `origins` lists the allowed CORS origins; empty
/// allows any.
pub fn router(state: AppState, origins: &[String]) -> Router {
    let allow = if origins.is_empty() {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    let cors = CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST, Method::DELETE])
        .allow_headers([CONTENT_TYPE, IF_NONE_MATCH])
        .expose_headers([ETAG]);
    Router::new()
        .route("/maps", get(list_maps))
        .route("/maps/{id}", get(get_map))
        .route("/maps/{id}/svg", get(map_svg))
        .route("/sessions", post(open_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/route", get(session_route))
        .route("/sessions/{id}/answers", post(post_answer))
        .route("/sessions/{id}/answers/{*decision}", delete(delete_answer))
        .route("/sessions/{id}/svg", get(session_svg))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint") })
        .layer(cors)
        .with_state(state)
}

fn body<T>(b: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    b.map(|Json(v)| v).map_err(|r| {
        let status = r.status();
        let code = if status == StatusCode::UNPROCESSABLE_ENTITY { "invalid_body" } else { "bad_request" };
        ApiError::new(status, code, r.body_text())
    })
}

fn svg_response(svg: String, etag: Option<String>) -> Response {
    let mut headers = HeaderMap::new();
    headers.insert(CONTENT_TYPE, HeaderValue::from_static("image/svg+xml"));
    if let Some(tag) = etag.and_then(|t| HeaderValue::from_str(&t).ok()) {
        headers.insert(ETAG, tag);
        headers.insert(CACHE_CONTROL, HeaderValue::from_static("no-cache"));
    }
    (headers, svg).into_response()
}

fn not_modified(req: &HeaderMap, etag: &str) -> bool {
    req.get(IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|t| t.trim() == etag || t.trim() == "*"))
}

async fn list_maps(State(app): State<AppState>) -> impl IntoResponse {
    Json(app.catalog.summaries())
}

async fn get_map(State(app): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let map = app.map(&id)?;
    Ok(Json(to_json_value(&map.set.set)))
}

#[derive(Debug, Deserialize)]
struct SvgQuery {
    /// A sub-map of the set to draw instead of the root.
    doc: Option<String>,
}

async fn map_svg(State(app): State<AppState>, Path(id): Path<String>, Query(q): Query<SvgQuery>) -> Result<Response, ApiError> {
    let map = app.map(&id)?;
    let doc = match &q.doc {
        Some(d) => map
            .set
            .doc(d)
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "doc_not_found", format!("map '{id}' has no document '{d}'")))?,
        None => map.set.root_doc(),
    };
    let svg = emit_svg(&layout(doc), None).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(svg_response(svg, None))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct OpenSession {
    map_id: String,
    #[serde(default)]
    mode: Mode,
    #[serde(default)]
    withheld: BTreeSet<String>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SessionView {
    session_id: String,
    map_id: String,
    mode: Mode,
    created: u64,
    updated: u64,
    route: Route,
}

impl SessionView {
    fn new(s: Session, route: Route) -> Self {
        SessionView {
            session_id: s.id,
            map_id: s.map_id,
            mode: s.mode,
            created: s.created,
            updated: s.updated,
            route,
        }
    }
}

async fn open_session(State(app): State<AppState>, req: Result<Json<OpenSession>, JsonRejection>) -> Result<Response, ApiError> {
    let req = body(req)?;
    let map = app.map(&req.map_id)?;
    let (s, route) = app.sessions.open(&map, req.mode, req.withheld)?;
    tracing::info!(session = %s.id, map = %s.map_id, "session opened");
    let etag = s.etag();
    let mut resp = (StatusCode::CREATED, Json(SessionView::new(s, route))).into_response();
    if let Ok(v) = HeaderValue::from_str(&etag) {
        resp.headers_mut().insert(ETAG, v);
    }
    Ok(resp)
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let (s, map) = app.session(&id)?;
    let route = s.route(&map)?;
    Ok(Json(SessionView::new(s, route)))
}

fn route_response(s: &Session, route: Route) -> Response {
    let mut resp = Json(route).into_response();
    if let Ok(v) = HeaderValue::from_str(&s.etag()) {
        resp.headers_mut().insert(ETAG, v);
    }
    resp
}

async fn session_route(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (s, map) = app.session(&id)?;
    let route = s.route(&map)?;
    Ok(route_response(&s, route))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Answer {
    decision: String,
    label: String,
}

async fn post_answer(
    State(app): State<AppState>,
    Path(id): Path<String>,
    req: Result<Json<Answer>, JsonRejection>,
) -> Result<Response, ApiError> {
    let req = body(req)?;
    let (_, map) = app.session(&id)?;
    let (s, route) = app
        .sessions
        .answer(&id, &map, &req.decision, &req.label)
        .ok_or_else(|| ApiError::session_not_found(&id))??;
    Ok(route_response(&s, route))
}

async fn delete_answer(State(app): State<AppState>, Path((id, decision)): Path<(String, String)>) -> Result<Response, ApiError> {
    let (_, map) = app.session(&id)?;
    let decision = decision.trim_start_matches('/');
    let (s, route) = app
        .sessions
        .retract(&id, &map, decision)
        .ok_or_else(|| ApiError::session_not_found(&id))??;
    Ok(route_response(&s, route))
}

async fn session_svg(State(app): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> Result<Response, ApiError> {
    let (s, map) = app.session(&id)?;
    let etag = s.etag();
    if not_modified(&headers, &etag) {
        let mut resp = StatusCode::NOT_MODIFIED.into_response();
        if let Ok(v) = HeaderValue::from_str(&etag) {
            resp.headers_mut().insert(ETAG, v);
        }
        return Ok(resp);
    }
    let route = s.route(&map)?;
    let svg = emit_svg(&layout(map.set.root_doc()), Some(&route)).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(svg_response(svg, Some(etag)))
}
