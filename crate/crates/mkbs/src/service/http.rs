//! HTTP/JSON routes over [`Service`].

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, Request, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::wire::{CreateSession, RuleSource, SubmitAnswer};
use super::{ApiError, Service};

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/kbs", get(list_kbs))
        .route("/kbs/{kb_id}/sessions", post(create_session))
        .route("/kbs/{kb_id}/net", get(net))
        .route("/kbs/{kb_id}/rules", get(list_rules).post(add_rule))
        .route("/kbs/{kb_id}/rules/{rule_id}", put(update_rule).delete(delete_rule))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/answers", post(submit_answer))
        .route("/sessions/{id}/trace", get(get_trace))
        .fallback(|| async { ApiError::new(404, "NOT_FOUND", "no such route") })
        .layer(middleware::from_fn(log_request))
        .with_state(service)
}

/// Adds `/ui` serving static files from `dir`, for the browser client.
pub fn with_static(router: Router, dir: &Path) -> Router {
    router.nest_service("/ui", tower_http::services::ServeDir::new(dir))
}

async fn log_request(req: Request, next: Next) -> Response {
    let method = req.method().clone();
    let path = req.uri().path().to_owned();
    let start = Instant::now();
    let res = next.run(req).await;
    tracing::info!(
        "{method} {path} {} {:.1}ms",
        res.status().as_u16(),
        start.elapsed().as_secs_f64() * 1e3
    );
    res
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        json(status, &self.body())
    }
}

fn json<T: Serialize>(status: StatusCode, body: &T) -> Response {
    match serde_json::to_string(body) {
        Ok(text) => raw_json(status, text),
        Err(e) => ApiError::new(500, "INTERNAL", e.to_string()).into_response(),
    }
}

fn raw_json(status: StatusCode, text: String) -> Response {
    let mut res = (status, text).into_response();
    res.headers_mut().insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    res
}

type Reply = Result<Response, ApiError>;

fn ok<T: Serialize>(body: T) -> Reply {
    Ok(json(StatusCode::OK, &body))
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(400, "BAD_REQUEST", e.to_string()))
}

async fn list_kbs(State(svc): State<Arc<Service>>) -> Reply {
    ok(svc.list_kbs())
}

async fn create_session(State(svc): State<Arc<Service>>, UrlPath(kb_id): UrlPath<String>, body: Bytes) -> Reply {
    let req: CreateSession = parse_body(&body)?;
    Ok(json(StatusCode::CREATED, &svc.create_session(&kb_id, &req.goal)?))
}

async fn get_session(State(svc): State<Arc<Service>>, UrlPath(id): UrlPath<String>) -> Reply {
    ok(svc.get_session(&id)?)
}

async fn submit_answer(State(svc): State<Arc<Service>>, UrlPath(id): UrlPath<String>, body: Bytes) -> Reply {
    let req: SubmitAnswer = parse_body(&body)?;
    ok(svc.submit_answer(&id, &req)?)
}

async fn get_trace(State(svc): State<Arc<Service>>, UrlPath(id): UrlPath<String>) -> Reply {
    Ok(raw_json(StatusCode::OK, svc.get_trace(&id)?))
}

#[derive(Debug, Deserialize)]
struct NetParams {
    relation: Option<String>,
    node: Option<String>,
    #[serde(default)]
    inherit: Option<String>,
}

async fn net(State(svc): State<Arc<Service>>, UrlPath(kb_id): UrlPath<String>, Query(p): Query<NetParams>) -> Reply {
    let node = p.node.ok_or_else(|| ApiError::new(400, "BAD_REQUEST", "missing `node` parameter"))?;
    let inherit = match p.inherit.as_deref() {
        None | Some("false") | Some("0") => false,
        Some("true") | Some("1") | Some("") => true,
        Some(other) => {
            return Err(ApiError::new(400, "BAD_REQUEST", format!("`inherit` must be true or false, not `{other}`")))
        }
    };
    match p.relation {
        Some(relation) => ok(svc.net_query(&kb_id, &relation, &node, inherit)?),
        None => ok(svc.net_describe(&kb_id, &node)?),
    }
}

async fn list_rules(State(svc): State<Arc<Service>>, UrlPath(kb_id): UrlPath<String>) -> Reply {
    ok(svc.list_rules(&kb_id)?)
}

async fn add_rule(State(svc): State<Arc<Service>>, UrlPath(kb_id): UrlPath<String>, body: Bytes) -> Reply {
    let req: RuleSource = parse_body(&body)?;
    Ok(json(StatusCode::CREATED, &svc.add_rule(&kb_id, &req.source)?))
}

async fn update_rule(
    State(svc): State<Arc<Service>>,
    UrlPath((kb_id, rule_id)): UrlPath<(String, String)>,
    body: Bytes,
) -> Reply {
    let req: RuleSource = parse_body(&body)?;
    ok(svc.update_rule(&kb_id, &rule_id, &req.source)?)
}

async fn delete_rule(State(svc): State<Arc<Service>>, UrlPath((kb_id, rule_id)): UrlPath<(String, String)>) -> Reply {
    ok(svc.delete_rule(&kb_id, &rule_id)?)
}
