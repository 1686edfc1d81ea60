//! HTTP facade for the survey engine.
//!
//! Sessions live behind unguessable tokens; nothing enumerates them. Every
//! mutation on one token runs under that token's lock, and reports are
//! recomputed on each request so they are available as soon as a session
//! completes.

mod error;
mod state;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use fairist_core::content_pack::BUILTIN_ID;
use fairist_core::{
    apply_rules, AnswerValue, Next, Question, RenderFormat, Session, SessionStatus, SessionStore,
    Token,
};
use serde::Deserialize;
use serde_json::{json, Value};

pub use error::ApiError;
pub use state::{AppState, PublishedSchema, SchemaRegistry, TokenLocks};

pub const ADDR_ENV: &str = "FAIRIST_ADDR";
pub const DATA_DIR_ENV: &str = "FAIRIST_DATA_DIR";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub addr: SocketAddr,
    pub data_dir: PathBuf,
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/v1/sessions", post(create_session))
        .route(
            "/api/v1/sessions/{token}",
            get(get_session).delete(delete_session),
        )
        .route("/api/v1/sessions/{token}/next", get(next_question))
        .route("/api/v1/sessions/{token}/answers", post(submit_answer))
        .route(
            "/api/v1/sessions/{token}/answers/{question_id}",
            delete(retract_answer),
        )
        .route("/api/v1/sessions/{token}/complete", post(complete_session))
        .route("/api/v1/reports/{token}", get(get_report))
        .route("/api/v1/schemas", get(list_schemas))
        .route("/api/v1/schemas/{id}", get(get_schema))
        .with_state(state)
}

/// Binds and serves until the process is stopped.
pub async fn serve(config: ServiceConfig) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let store = SessionStore::open(&config.data_dir)?;
    let listener = tokio::net::TcpListener::bind(config.addr).await?;
    tracing::info!(addr = %listener.local_addr()?, data_dir = %config.data_dir.display(), "listening");
    run(listener, store).await?;
    Ok(())
}

/// Serves the built-in schemas on an already bound listener.
pub async fn run(listener: tokio::net::TcpListener, store: SessionStore) -> std::io::Result<()> {
    let state = Arc::new(AppState::new(store, SchemaRegistry::builtin()));
    axum::serve(listener, router(state)).await
}

/// Runs a blocking store operation off the async workers.
async fn blocking<T: Send + 'static>(
    state: &Shared,
    f: impl FnOnce(&AppState) -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    let state = state.clone();
    tokio::task::spawn_blocking(move || f(&state))
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(e.to_string()))
}

pub fn session_json(session: &Session) -> Value {
    let answers: serde_json::Map<String, Value> = session
        .answers
        .iter()
        .map(|(k, v)| (k.clone(), v.to_json()))
        .collect();
    json!({
        "token": session.token.as_str(),
        "schema_id": session.schema_id,
        "schema_version": session.schema_version,
        "status": match session.status {
            SessionStatus::InProgress => "in_progress",
            SessionStatus::Complete => "complete",
        },
        "answers": answers,
        "created_at": session.created_at.to_rfc3339(),
    })
}

pub fn question_json(question: &Question) -> Value {
    json!({
        "id": question.id,
        "prompt": question.prompt,
        "kind": question.kind.as_str(),
        "options": question.options,
    })
}

fn next_json(next: Next<'_>) -> Value {
    match next {
        Next::Question(q) => question_json(q),
        Next::Complete => json!({"complete": true}),
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    #[serde(default)]
    schema_id: Option<String>,
}

async fn create_session(State(state): State<Shared>, body: Bytes) -> ApiResult<Response> {
    let request: CreateSession = if body.iter().all(u8::is_ascii_whitespace) {
        CreateSession::default()
    } else {
        parse_body(&body)?
    };
    let schema_id = request.schema_id.unwrap_or_else(|| BUILTIN_ID.to_owned());
    let session = blocking(&state, move |state| {
        let published = state.schemas.get(&schema_id).ok_or_else(|| {
            ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "unknown_schema",
                format!("no published schema {schema_id:?}"),
            )
        })?;
        let token = Token::try_mint().map_err(|e| ApiError::internal(e.to_string()))?;
        let session = Session::start(&published.schema, token)?;
        state.store.save(&session)?;
        Ok(session)
    })
    .await?;
    let body = json!({
        "token": session.token.as_str(),
        "schema_id": session.schema_id,
        "schema_version": session.schema_version,
    });
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn get_session(
    State(state): State<Shared>,
    Path(token): Path<String>,
) -> ApiResult<Json<Value>> {
    let session = blocking(&state, move |state| Ok(state.store.load(&token)?)).await?;
    Ok(Json(session_json(&session)))
}

async fn delete_session(
    State(state): State<Shared>,
    Path(token): Path<String>,
) -> ApiResult<StatusCode> {
    blocking(&state, move |state| {
        state.locks.with(&token, || state.store.delete(&token))?;
        Ok(StatusCode::NO_CONTENT)
    })
    .await
}

async fn next_question(
    State(state): State<Shared>,
    Path(token): Path<String>,
) -> ApiResult<Json<Value>> {
    blocking(&state, move |state| {
        let (session, schema) = state.load(&token)?;
        Ok(Json(next_json(session.next_question(&schema))))
    })
    .await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SubmitAnswer {
    question_id: String,
    value: Value,
}

async fn submit_answer(
    State(state): State<Shared>,
    Path(token): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let request: SubmitAnswer = parse_body(&body)?;
    blocking(&state, move |state| {
        let (session, next) = state.mutate(&token, |session, schema| {
            if session.is_complete() {
                return Err(fairist_core::SessionError::AlreadyComplete.into());
            }
            let question = schema.question(&request.question_id).ok_or_else(|| {
                ApiError::from(fairist_core::SessionError::UnknownQuestion(
                    request.question_id.clone(),
                ))
            })?;
            let value = AnswerValue::from_json(question.kind, &request.value).map_err(|e| {
                ApiError::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "type_mismatch",
                    e.to_string(),
                )
                .with_question(&request.question_id)
            })?;
            session.submit_answer(schema, &request.question_id, value)?;
            Ok(next_json(session.next_question(schema)))
        })?;
        Ok(Json(
            json!({"session": session_json(&session), "next": next}),
        ))
    })
    .await
}

async fn retract_answer(
    State(state): State<Shared>,
    Path((token, question_id)): Path<(String, String)>,
) -> ApiResult<Json<Value>> {
    blocking(&state, move |state| {
        let (session, ()) = state.mutate(&token, |session, schema| {
            Ok(session.retract_answer(schema, &question_id)?)
        })?;
        Ok(Json(session_json(&session)))
    })
    .await
}

async fn complete_session(
    State(state): State<Shared>,
    Path(token): Path<String>,
) -> ApiResult<Json<Value>> {
    blocking(&state, move |state| {
        state.mutate(&token, |session, schema| {
            if session.is_complete() {
                return Err(fairist_core::SessionError::AlreadyComplete.into());
            }
            Ok(session.complete(schema)?)
        })?;
        Ok(Json(json!({"report": format!("/api/v1/reports/{token}")})))
    })
    .await
}

#[derive(Deserialize)]
struct ReportQuery {
    format: Option<String>,
}

async fn get_report(
    State(state): State<Shared>,
    Path(token): Path<String>,
    Query(query): Query<ReportQuery>,
) -> ApiResult<Response> {
    let format: RenderFormat = query.format.as_deref().unwrap_or("md").parse().map_err(
        |e: fairist_core::render::UnknownFormat| {
            ApiError::new(StatusCode::BAD_REQUEST, "unknown_format", e.to_string())
        },
    )?;
    let body = blocking(&state, move |state| {
        let (session, schema) = state.load(&token)?;
        let report = apply_rules(&schema, &session)?;
        Ok(format.render(&report))
    })
    .await?;
    Ok(([(header::CONTENT_TYPE, format.media_type())], body).into_response())
}

async fn list_schemas(State(state): State<Shared>) -> Json<Value> {
    let list: Vec<Value> = state
        .schemas
        .iter()
        .map(|p| json!({"id": p.schema.id, "version": p.schema.version}))
        .collect();
    Json(Value::Array(list))
}

async fn get_schema(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let published = state.schemas.get(&id).ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "unknown_schema",
            format!("no published schema {id:?}"),
        )
    })?;
    Ok((
        [(header::CONTENT_TYPE, "application/json")],
        published.document.clone(),
    )
        .into_response())
}
