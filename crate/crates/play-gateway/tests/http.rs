use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use multideal::protocol::ActionKind;
use multideal::record::{replay, MatchRecord, ReplayKind};
use play_gateway::wire::ActionRequest;
use play_gateway::{router, SessionManager};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> (Arc<SessionManager>, Router) {
    let m = Arc::new(SessionManager::new(Vec::new(), Duration::from_secs(60)));
    (Arc::clone(&m), router(m))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn post_raw(app: &Router, uri: &str, raw: &str) -> (StatusCode, Value) {
    let req = Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(raw.to_owned()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn assert_error(v: &Value, code: &str) {
    assert_eq!(v["v"], "1");
    assert_eq!(v["type"], "error");
    assert_eq!(v["body"]["code"], code);
    assert!(v["body"]["reason"].as_str().is_some_and(|r| !r.is_empty()));
}

async fn create(app: &Router, bots: &[&str]) -> String {
    let (status, v) = call(
        app,
        Method::POST,
        "/v1/sessions",
        Some(json!({ "scenario": "trade", "bots": bots, "seed": 3 })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["type"], "state");
    assert_eq!(v["body"]["status"], "awaiting_human");
    v["body"]["token"].as_str().unwrap().to_owned()
}

#[tokio::test]
async fn templates_and_creation() {
    let (_, app) = app();
    let (status, v) = call(&app, Method::GET, "/v1/templates", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!((v["v"].as_str(), v["type"].as_str()), (Some("1"), Some("templates")));
    let names: Vec<_> = v["body"].as_array().unwrap().iter().map(|t| t["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"trade"));

    let token = create(&app, &["acceptor", "acceptor"]).await;
    let (status, v) = call(&app, Method::GET, &format!("/v1/sessions/{token}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["body"]["token"], token.as_str());
    assert_eq!(v["body"]["slot_count"], 2);
}

#[tokio::test]
async fn request_errors() {
    let (_, app) = app();
    let (status, v) = post_raw(&app, "/v1/sessions", "{not json").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&v, "bad_request");

    let (status, v) = post_raw(&app, "/v1/sessions", r#"{"scenario":"trade","bots":["random"],"colour":1}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&v, "bad_request");

    let (status, v) = call(&app, Method::POST, "/v1/sessions", Some(json!({ "scenario": "trade", "bots": ["wizard"] }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error(&v, "not_found");

    let (status, v) = call(&app, Method::GET, "/v1/sessions/0123abcd", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error(&v, "not_found");

    let (status, v) = call(&app, Method::GET, "/v2/nothing", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error(&v, "not_found");

    let token = create(&app, &["random"]).await;
    let actions = format!("/v1/sessions/{token}/actions");
    let (status, v) = call(&app, Method::POST, &actions, Some(json!({ "kind": "accept" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_error(&v, "illegal_action");
    let (status, v) = call(&app, Method::POST, &actions, Some(json!({ "kind": "haggle" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&v, "bad_request");
    let (status, v) = call(&app, Method::POST, &actions, Some(json!({ "kind": "offer" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&v, "bad_request");
}

#[tokio::test]
async fn utility_queries() {
    let (_, app) = app();
    let token = create(&app, &["random"]).await;
    let base = format!("/v1/sessions/{token}/utility");
    let (status, v) = call(&app, Method::GET, &format!("{base}?levels=0,0,0"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["type"], "utility");
    assert_eq!(v["body"]["levels"], json!([0, 0, 0]));
    assert!(v["body"]["own_utility"].as_f64().is_some());
    assert!(v["body"]["combined_if_agreed"].as_f64().is_some());
    for bad in ["?levels=a,b", "?levels=9,9,9", "?levels=0", ""] {
        let (status, v) = call(&app, Method::GET, &format!("{base}{bad}"), None).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad}");
        assert_error(&v, "bad_request");
    }
}

#[tokio::test]
async fn finished_sessions_refuse_actions_and_export_a_record() {
    let (_, app) = app();
    let token = create(&app, &["acceptor", "acceptor"]).await;
    let summary = format!("/v1/sessions/{token}/summary");
    let actions = format!("/v1/sessions/{token}/actions");

    let (status, v) = call(&app, Method::GET, &summary, None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_error(&v, "conflict");

    let (status, v) = call(&app, Method::POST, &actions, Some(json!({ "kind": "offer", "levels": [0, 0, 0] }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["body"]["active_slot"], 1);
    let (_, v) = call(&app, Method::POST, &actions, Some(json!({ "kind": "end" }))).await;
    assert_eq!(v["body"]["status"], "finished");
    let (status, v) = call(&app, Method::POST, &actions, Some(json!({ "kind": "end" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_error(&v, "conflict");

    let (status, v) = call(&app, Method::GET, &summary, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["type"], "summary");
    assert_eq!(v["body"]["slots"][0]["agreed"], true);
    assert_eq!(v["body"]["slots"][1]["agreed"], false);
    let record = MatchRecord::from_json(&v["body"]["record"].to_string()).unwrap();
    assert_eq!(record.center, "human");
    assert_eq!(replay(&record).unwrap(), ReplayKind::AuditOnly);
    assert_eq!(v["body"]["center_utility"].as_f64(), Some(record.result.center_utility));
}

/// Reads SSE frames until one carries `event: state`.
async fn frames_until_state(body: &mut Body) -> String {
    let mut text = String::new();
    while !text.contains("event: state") {
        let frame = tokio::time::timeout(Duration::from_secs(10), body.frame())
            .await
            .expect("event within the timeout")
            .expect("stream still open")
            .unwrap();
        if let Ok(data) = frame.into_data() {
            text.push_str(std::str::from_utf8(&data).unwrap());
        }
    }
    text
}

#[tokio::test]
async fn events_stream_moves_and_states() {
    let (m, app) = app();
    let token = create(&app, &["conceder", "conceder"]).await;
    let resp = app
        .clone()
        .oneshot(Request::get(format!("/v1/sessions/{token}/events")).body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let ctype = resp.headers()[header::CONTENT_TYPE].to_str().unwrap().to_owned();
    assert!(ctype.starts_with("text/event-stream"), "{ctype}");
    let mut body = resp.into_body();

    let t = token.clone();
    let m2 = Arc::clone(&m);
    tokio::task::spawn_blocking(move || {
        m2.submit(&t, ActionRequest { kind: ActionKind::Offer, levels: Some(vec![0, 0, 0]) })
    })
    .await
    .unwrap()
    .unwrap();

    let text = frames_until_state(&mut body).await;
    assert!(text.contains("event: move"));
    let data: Vec<Value> = text
        .lines()
        .filter_map(|l| l.strip_prefix("data: "))
        .map(|d| serde_json::from_str(d).unwrap())
        .collect();
    assert!(data.iter().all(|d| d["v"] == "1"));
    let first = &data[0];
    assert_eq!(first["type"], "move");
    assert_eq!(first["body"]["seat"], "center");
    assert_eq!(first["body"]["kind"], "offer");
    assert_eq!(first["body"]["levels"], json!([0, 0, 0]));
    let state = data.iter().find(|d| d["type"] == "state").unwrap();
    assert_eq!(state["body"]["token"], token.as_str());
    assert_eq!(state["body"], serde_json::to_value(m.state(&token).unwrap()).unwrap());

    let (status, v) = call(&app, Method::GET, "/v1/sessions/ffff/events", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error(&v, "not_found");
}
