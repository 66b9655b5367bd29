//! HTTP interface over an [`FdoSpace`].
//!
//! PIDs appear in paths as two segments, `{prefix}/{suffix}`; a `/` inside
//! a suffix must be percent-encoded. All bodies are JSON except the
//! `triples` and `dot` graph exports.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::conformance::{ConformanceError, ConformanceReport};
use crate::graph::GraphError;
use crate::ops::{OperationError, Target};
use crate::record::{parse_record, serialize_record, RecordError};
use crate::registry::RegistryError;
use crate::space::FdoSpace;
use crate::validation::ValidationOutcome;
use crate::Pid;

/// Error body: `{ "code": ..., "detail": ... }` plus optional details.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationOutcome>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, detail: impl Into<String>) -> Self {
        Self { status, code: code.to_owned(), detail: detail.into(), validation: None }
    }

    fn malformed(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "MalformedRecordDocument", detail)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<RegistryError> for ApiError {
    fn from(e: RegistryError) -> Self {
        let status = match e {
            RegistryError::NotFound(_) => StatusCode::NOT_FOUND,
            RegistryError::RemoteUnavailable(_) => StatusCode::BAD_GATEWAY,
            RegistryError::MalformedRecordDocument { .. } | RegistryError::InvalidPrefix(_) => StatusCode::BAD_REQUEST,
            RegistryError::ImmutableEntry(_) | RegistryError::AlreadyRegistered(_) => StatusCode::CONFLICT,
            RegistryError::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<RecordError> for ApiError {
    fn from(e: RecordError) -> Self {
        match e {
            RecordError::Registry(inner) => inner.into(),
            RecordError::ValidationFailed(outcome) => ApiError {
                validation: Some(outcome.clone()),
                ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ValidationFailed", outcome.to_string())
            },
            RecordError::MalformedRecordDocument(_) => ApiError::malformed(e.to_string()),
            RecordError::AlreadyRegistered(_) => ApiError::new(StatusCode::CONFLICT, e.code(), e.to_string()),
            RecordError::UnknownProfile(_) | RecordError::InvalidProfile { .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string())
            }
        }
    }
}

impl From<OperationError> for ApiError {
    fn from(e: OperationError) -> Self {
        let status = match e {
            OperationError::UnknownOperation(_) => StatusCode::NOT_FOUND,
            OperationError::MissingAccessKey | OperationError::NotApplicable(_) => StatusCode::CONFLICT,
            OperationError::FetchFailed(_) => StatusCode::BAD_GATEWAY,
            OperationError::InvalidParameters(_)
            | OperationError::InvalidCriterion(_)
            | OperationError::DuplicateOperationName(_) => StatusCode::BAD_REQUEST,
            OperationError::Failed(_) => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<GraphError> for ApiError {
    fn from(e: GraphError) -> Self {
        let status = match e {
            GraphError::UnknownNode(_) => StatusCode::NOT_FOUND,
            GraphError::MalformedTriples { .. } => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<ConformanceError> for ApiError {
    fn from(e: ConformanceError) -> Self {
        ApiError::malformed(e.to_string())
    }
}

type AppState = Arc<FdoSpace>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(space: Arc<FdoSpace>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/records", post(create_record))
        .route("/records/validate", post(validate_record))
        .route("/records/{prefix}/{suffix}", get(get_record))
        .route("/records/{prefix}/{suffix}/operations", get(list_operations))
        .route("/records/{prefix}/{suffix}/operations/{name}", post(run_operation))
        .route("/graph", get(graph))
        .route("/graph/path", get(graph_path))
        .route("/conformance", post(conformance))
        .with_state(space)
}

/// Binds `addr` and serves until Ctrl-C.
pub async fn serve(space: Arc<FdoSpace>, addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(space))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string())))
}

fn path_pid(prefix: &str, suffix: &str) -> ApiResult<Pid> {
    Pid::from_parts(prefix, suffix)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "InvalidPidSyntax", e.to_string()))
}

fn json_body(body: &Bytes) -> ApiResult<Value> {
    if body.is_empty() {
        return Ok(Value::Null);
    }
    serde_json::from_slice(body).map_err(|e| ApiError::malformed(e.to_string()))
}

async fn healthz(State(space): State<AppState>) -> Json<Value> {
    Json(json!({
        "status": "ok",
        "service": "fdo",
        "records": space.registry().len(),
        "fixtures_loaded": space.fixtures_loaded(),
        "profiles": space.types().profiles().len(),
        "online": space.registry().is_online(),
    }))
}

async fn create_record(State(space): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::malformed(e.to_string()))?.to_owned();
    blocking(move || {
        let mut record = parse_record(&text)?;
        if record.pid.is_some() {
            return Err(ApiError::malformed("a new record must not carry a pid"));
        }
        let pid = space.records().register_record(&mut record)?;
        let doc = serialize_record(&record, space.types());
        let location = format!("/records/{}/{}", pid.prefix(), pid.suffix().replace('/', "%2F"));
        Ok((StatusCode::CREATED, [(header::LOCATION, location)], Json(json!({ "pid": pid, "record": doc["record"] })))
            .into_response())
    })
    .await
}

async fn get_record(State(space): State<AppState>, Path((prefix, suffix)): Path<(String, String)>) -> ApiResult<Json<Value>> {
    let pid = path_pid(&prefix, &suffix)?;
    blocking(move || {
        let record = space.resolve(&pid)?;
        Ok(Json(serialize_record(&record, space.types())))
    })
    .await
}

#[derive(Debug, Deserialize)]
struct ValidateQuery {
    profile: Option<String>,
}

async fn validate_record(
    State(space): State<AppState>,
    Query(query): Query<ValidateQuery>,
    body: Bytes,
) -> ApiResult<Json<ValidationOutcome>> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::malformed(e.to_string()))?;
    let record = parse_record(text)?;
    Ok(Json(space.records().validate_record(&record, query.profile.as_deref())?))
}

#[derive(Debug, Serialize)]
struct OperationView {
    name: String,
    target: Target,
    applicable: bool,
    criterion: crate::ops::AssociationCriterion,
}

async fn list_operations(
    State(space): State<AppState>,
    Path((prefix, suffix)): Path<(String, String)>,
) -> ApiResult<Json<Value>> {
    let pid = path_pid(&prefix, &suffix)?;
    blocking(move || {
        let record = space.resolve(&pid)?;
        let ops: Vec<OperationView> = space
            .ops()
            .associate(&record)
            .iter()
            .map(|d| OperationView {
                name: d.name.clone(),
                target: d.target,
                applicable: space.ops().applicable(d, &record),
                criterion: d.criterion.clone(),
            })
            .collect();
        Ok(Json(json!({ "record_pid": pid, "operations": ops })))
    })
    .await
}

async fn run_operation(
    State(space): State<AppState>,
    Path((prefix, suffix, name)): Path<(String, String, String)>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let pid = path_pid(&prefix, &suffix)?;
    let params = json_body(&body)?;
    blocking(move || {
        let record = space.resolve(&pid)?;
        let result = space.ops().execute_with(&name, &record, &params)?;
        Ok(Json(serde_json::to_value(result).expect("operation result serializes")))
    })
    .await
}

#[derive(Debug, Deserialize)]
struct GraphQuery {
    format: Option<String>,
}

async fn graph(State(space): State<AppState>, Query(query): Query<GraphQuery>) -> ApiResult<Response> {
    let graph = space.graph();
    match query.format.as_deref() {
        None | Some("json") => Ok(Json(json!({
            "nodes": graph.nodes(),
            "predicates": graph.predicates(),
            "triples": graph.triples(),
        }))
        .into_response()),
        Some("triples") => Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], graph.export_triples()).into_response()),
        Some("dot") => Ok(([(header::CONTENT_TYPE, "text/vnd.graphviz")], graph.export_dot()).into_response()),
        Some(other) => Err(ApiError::new(StatusCode::BAD_REQUEST, "InvalidParameters", format!("unknown format {other:?}"))),
    }
}

#[derive(Debug, Deserialize)]
struct PathQuery {
    from: Option<String>,
    to: Option<String>,
}

async fn graph_path(State(space): State<AppState>, Query(query): Query<PathQuery>) -> ApiResult<Json<Value>> {
    let parse = |name: &str, v: Option<String>| -> ApiResult<Pid> {
        let v = v.ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "InvalidParameters", format!("missing {name}")))?;
        Pid::parse(&v).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "InvalidPidSyntax", e.to_string()))
    };
    let (from, to) = (parse("from", query.from)?, parse("to", query.to)?);
    let path = space.graph().path(&from, &to)?;
    Ok(Json(json!({ "from": from, "to": to, "reachable": path.is_some(), "path": path })))
}

async fn conformance(State(space): State<AppState>, body: Bytes) -> ApiResult<Json<Value>> {
    let value = json_body(&body)?;
    blocking(move || {
        let check = |doc: &Value| -> ApiResult<ConformanceReport> {
            Ok(space.conformance().check_document(&doc.to_string())?)
        };
        match &value {
            Value::Array(docs) => {
                let reports = docs.iter().map(check).collect::<ApiResult<Vec<_>>>()?;
                Ok(Json(serde_json::to_value(reports).expect("reports serialize")))
            }
            doc => Ok(Json(serde_json::to_value(check(doc)?).expect("report serializes"))),
        }
    })
    .await
}
