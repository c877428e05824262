use std::convert::Infallible;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio_stream::wrappers::BroadcastStream;
use tokio_stream::{Stream, StreamExt};

use crate::manager::{GatewayError, SessionManager};
use crate::wire::*;

impl IntoResponse for GatewayError {
    fn into_response(self) -> Response {
        let status = match self {
            GatewayError::NotFound(_) => StatusCode::NOT_FOUND,
            GatewayError::Conflict(_) => StatusCode::CONFLICT,
            GatewayError::IllegalAction(_) => StatusCode::UNPROCESSABLE_ENTITY,
            GatewayError::BadRequest(_) => StatusCode::BAD_REQUEST,
        };
        (status, Json(Envelope::new("error", self.body()))).into_response()
    }
}

type Reply<T> = Result<Json<Envelope<T>>, GatewayError>;

fn reply<T: Serialize>(kind: &str, body: T) -> Reply<T> {
    Ok(Json(Envelope::new(kind, body)))
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, GatewayError> {
    payload.map(|Json(t)| t).map_err(|e| GatewayError::BadRequest(e.body_text()))
}

async fn templates(State(m): State<Arc<SessionManager>>) -> Reply<Vec<TemplateView>> {
    reply("templates", m.templates())
}

async fn create(
    State(m): State<Arc<SessionManager>>,
    payload: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<Envelope<StateView>>), GatewayError> {
    let view = m.create(body(payload)?)?;
    Ok((StatusCode::CREATED, Json(Envelope::new("state", view))))
}

async fn submit(
    State(m): State<Arc<SessionManager>>,
    Path(token): Path<String>,
    payload: Result<Json<ActionRequest>, JsonRejection>,
) -> Reply<StateView> {
    let req = body(payload)?;
    let view = tokio::task::spawn_blocking(move || m.submit(&token, req))
        .await
        .map_err(|e| GatewayError::Conflict(format!("action failed: {e}")))??;
    reply("state", view)
}

async fn state(State(m): State<Arc<SessionManager>>, Path(token): Path<String>) -> Reply<StateView> {
    reply("state", m.state(&token)?)
}

async fn summary(State(m): State<Arc<SessionManager>>, Path(token): Path<String>) -> Reply<SummaryView> {
    reply("summary", m.summary(&token)?)
}

#[derive(Deserialize)]
struct LevelsQuery {
    levels: String,
}

/// `levels=2,0,1`
fn parse_levels(s: &str) -> Result<Vec<usize>, GatewayError> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| GatewayError::BadRequest(format!("levels `{s}` must be comma-separated indices")))
}

async fn utility(
    State(m): State<Arc<SessionManager>>,
    Path(token): Path<String>,
    query: Result<Query<LevelsQuery>, axum::extract::rejection::QueryRejection>,
) -> Reply<UtilityView> {
    let Query(q) = query.map_err(|e| GatewayError::BadRequest(e.body_text()))?;
    reply("utility", m.utility(&token, parse_levels(&q.levels)?)?)
}

async fn events(
    State(m): State<Arc<SessionManager>>,
    Path(token): Path<String>,
) -> Result<Sse<impl Stream<Item = Result<SseEvent, Infallible>>>, GatewayError> {
    let rx = m.subscribe(&token)?;
    let stream = BroadcastStream::new(rx).filter_map(|item| {
        // a lagging client skips what it missed; the next state event resyncs it
        let event = item.ok()?;
        Some(Ok(SseEvent::default().event(event.name()).data(event.envelope().to_string())))
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

async fn fallback() -> GatewayError {
    GatewayError::NotFound("no such endpoint".into())
}

pub fn router(manager: Arc<SessionManager>) -> Router {
    Router::new()
        .route("/v1/templates", get(templates))
        .route("/v1/sessions", post(create))
        .route("/v1/sessions/{token}", get(state))
        .route("/v1/sessions/{token}/actions", post(submit))
        .route("/v1/sessions/{token}/summary", get(summary))
        .route("/v1/sessions/{token}/utility", get(utility))
        .route("/v1/sessions/{token}/events", get(events))
        .fallback(fallback)
        .with_state(manager)
}
