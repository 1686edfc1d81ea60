use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use fairist_core::content_pack::TABLE2_ANSWERS;
use fairist_core::SessionStore;
use fairist_service::{router, AppState, SchemaRegistry};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tempfile::TempDir;
use tower::ServiceExt;

struct Harness {
    app: Router,
    _dir: TempDir,
}

struct Reply {
    status: StatusCode,
    content_type: Option<String>,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap()
    }

    fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }
}

impl Harness {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let state = Arc::new(AppState::new(store, SchemaRegistry::builtin()));
        Self {
            app: router(state),
            _dir: dir,
        }
    }

    async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> Reply {
        let body = body.map_or_else(Body::empty, |b| Body::from(b.to_string()));
        self.raw(method, uri, body).await
    }

    async fn raw(&self, method: Method, uri: &str, body: Body) -> Reply {
        let request = Request::builder()
            .method(method)
            .uri(uri)
            .header("content-type", "application/json")
            .body(body)
            .unwrap();
        let response = self.app.clone().oneshot(request).await.unwrap();
        let status = response.status();
        let content_type = response
            .headers()
            .get("content-type")
            .map(|v| v.to_str().unwrap().to_owned());
        let body = response
            .into_body()
            .collect()
            .await
            .unwrap()
            .to_bytes()
            .to_vec();
        Reply {
            status,
            content_type,
            body,
        }
    }

    async fn create(&self) -> String {
        let r = self.call(Method::POST, "/api/v1/sessions", None).await;
        assert_eq!(r.status, StatusCode::CREATED);
        r.json()["token"].as_str().unwrap().to_owned()
    }

    async fn answer(&self, token: &str, question_id: &str, value: Value) -> Reply {
        self.call(
            Method::POST,
            &format!("/api/v1/sessions/{token}/answers"),
            Some(json!({"question_id": question_id, "value": value})),
        )
        .await
    }
}

fn table2_answers() -> Vec<(String, Value)> {
    let file: Value = serde_json::from_str(TABLE2_ANSWERS).unwrap();
    let schema = fairist_core::builtin_schema();
    let answers = file["answers"].as_object().unwrap();
    schema
        .questions
        .iter()
        .filter_map(|q| answers.get(&q.id).map(|v| (q.id.clone(), v.clone())))
        .collect()
}

#[tokio::test]
async fn create_session_reports_schema() {
    let h = Harness::new();
    let r = h
        .call(
            Method::POST,
            "/api/v1/sessions",
            Some(json!({"schema_id": "fairist-core"})),
        )
        .await;
    assert_eq!(r.status, StatusCode::CREATED);
    let body = r.json();
    assert_eq!(body["schema_id"], "fairist-core");
    assert_eq!(body["schema_version"], "1.0.0");
    assert_eq!(body["token"].as_str().unwrap().len(), 22);
}

#[tokio::test]
async fn full_walkthrough_yields_immediate_reports() {
    let h = Harness::new();
    let token = h.create().await;

    let first = h
        .call(Method::GET, &format!("/api/v1/sessions/{token}/next"), None)
        .await;
    assert_eq!(first.json()["id"], "q_project_name");

    for (question, value) in table2_answers() {
        let r = h.answer(&token, &question, value).await;
        assert_eq!(r.status, StatusCode::OK, "{question}: {}", r.text());
    }
    let next = h
        .call(Method::GET, &format!("/api/v1/sessions/{token}/next"), None)
        .await;
    assert_eq!(next.json(), json!({"complete": true}));

    let done = h
        .call(
            Method::POST,
            &format!("/api/v1/sessions/{token}/complete"),
            None,
        )
        .await;
    assert_eq!(done.status, StatusCode::OK);
    assert_eq!(done.json()["report"], format!("/api/v1/reports/{token}"));

    let md = h
        .call(
            Method::GET,
            &format!("/api/v1/reports/{token}?format=md"),
            None,
        )
        .await;
    assert_eq!(md.status, StatusCode::OK);
    assert!(md
        .content_type
        .as_deref()
        .unwrap()
        .starts_with("text/markdown"));
    assert!(md
        .text()
        .contains("ML model and data will be deposited at OpenML.org."));

    let js = h
        .call(
            Method::GET,
            &format!("/api/v1/reports/{token}?format=json"),
            None,
        )
        .await;
    assert_eq!(js.content_type.as_deref(), Some("application/json"));
    assert_eq!(
        js.json()["dimensions"]["Reusable"][0]["text"],
        "ML model and data will be deposited at OpenML.org."
    );

    let nt = h
        .call(
            Method::GET,
            &format!("/api/v1/reports/{token}?format=nt"),
            None,
        )
        .await;
    assert_eq!(nt.content_type.as_deref(), Some("application/n-triples"));
    assert!(nt.text().contains("<urn:fairist:vocab#hasFragment>"));

    let state = h
        .call(Method::GET, &format!("/api/v1/sessions/{token}"), None)
        .await;
    assert_eq!(state.json()["status"], "complete");
}

#[tokio::test]
async fn answers_reply_with_state_and_next_question() {
    let h = Harness::new();
    let token = h.create().await;
    h.answer(&token, "q_project_name", json!("RSL")).await;
    let r = h
        .answer(&token, "q_artifact_types", json!(["data", "ml_models"]))
        .await;
    assert_eq!(r.status, StatusCode::OK);
    let body = r.json();
    assert_eq!(
        body["session"]["answers"]["q_artifact_types"],
        json!(["data", "ml_models"])
    );
    assert_eq!(body["next"]["id"], "q_publication_venue");
    assert_eq!(body["next"]["kind"], "single_choice");

    h.answer(&token, "q_publication_venue", json!("project_website"))
        .await;
    let r = h.answer(&token, "q_ml_model_share", json!("openml")).await;
    assert_eq!(r.json()["next"]["id"], "q_ml_repro");

    // back-navigation cascades the branch away
    let r = h
        .call(
            Method::DELETE,
            &format!("/api/v1/sessions/{token}/answers/q_artifact_types"),
            None,
        )
        .await;
    assert_eq!(r.status, StatusCode::OK);
    let answers = r.json()["answers"].as_object().unwrap().clone();
    assert!(answers.contains_key("q_publication_venue"));
    assert!(!answers.contains_key("q_ml_model_share"));
}

#[tokio::test]
async fn error_statuses() {
    let h = Harness::new();
    let token = h.create().await;

    let hidden = h.answer(&token, "q_ml_model_share", json!("openml")).await;
    assert_eq!(hidden.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(hidden.json()["code"], "question_not_visible");
    assert_eq!(hidden.json()["question_id"], "q_ml_model_share");

    let typed = h.answer(&token, "q_artifact_types", json!("data")).await;
    assert_eq!(typed.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(typed.json()["code"], "type_mismatch");

    let unknown_option = h.answer(&token, "q_artifact_types", json!(["zz"])).await;
    assert_eq!(unknown_option.status, StatusCode::UNPROCESSABLE_ENTITY);

    let malformed = h
        .raw(
            Method::POST,
            &format!("/api/v1/sessions/{token}/answers"),
            Body::from("{nope"),
        )
        .await;
    assert_eq!(malformed.status, StatusCode::BAD_REQUEST);
    assert_eq!(malformed.json()["code"], "malformed_body");

    let incomplete = h
        .call(
            Method::POST,
            &format!("/api/v1/sessions/{token}/complete"),
            None,
        )
        .await;
    assert_eq!(incomplete.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(incomplete.json()["question_id"], "q_project_name");

    let early = h
        .call(Method::GET, &format!("/api/v1/reports/{token}"), None)
        .await;
    assert_eq!(early.status, StatusCode::CONFLICT);

    let bad_format = h
        .call(
            Method::GET,
            &format!("/api/v1/reports/{token}?format=pdf"),
            None,
        )
        .await;
    assert_eq!(bad_format.status, StatusCode::BAD_REQUEST);

    let bad_schema = h
        .call(
            Method::POST,
            "/api/v1/sessions",
            Some(json!({"schema_id": "nope"})),
        )
        .await;
    assert_eq!(bad_schema.status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn complete_sessions_reject_mutation_but_allow_retract() {
    let h = Harness::new();
    let token = h.create().await;
    for (question, value) in table2_answers() {
        h.answer(&token, &question, value).await;
    }
    h.call(
        Method::POST,
        &format!("/api/v1/sessions/{token}/complete"),
        None,
    )
    .await;

    let r = h.answer(&token, "q_project_name", json!("Other")).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    let again = h
        .call(
            Method::POST,
            &format!("/api/v1/sessions/{token}/complete"),
            None,
        )
        .await;
    assert_eq!(again.status, StatusCode::CONFLICT);

    let r = h
        .call(
            Method::DELETE,
            &format!("/api/v1/sessions/{token}/answers/q_code_libraries"),
            None,
        )
        .await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["status"], "in_progress");
}

#[tokio::test]
async fn unknown_and_deleted_tokens_are_indistinguishable() {
    let h = Harness::new();
    let token = h.create().await;
    let deleted = h
        .call(Method::DELETE, &format!("/api/v1/sessions/{token}"), None)
        .await;
    assert_eq!(deleted.status, StatusCode::NO_CONTENT);

    let never = fairist_core::Token::mint();
    let paths = [
        format!("/api/v1/reports/{never}"),
        format!("/api/v1/reports/{token}"),
        format!("/api/v1/sessions/{token}"),
        format!("/api/v1/sessions/{never}/next"),
        "/api/v1/sessions/not-a-token".to_owned(),
    ];
    let mut bodies = Vec::new();
    for p in &paths {
        let r = h.call(Method::GET, p, None).await;
        assert_eq!(r.status, StatusCode::NOT_FOUND, "{p}");
        bodies.push(r.body);
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}

#[tokio::test]
async fn schemas_are_published() {
    let h = Harness::new();
    let list = h.call(Method::GET, "/api/v1/schemas", None).await;
    assert_eq!(
        list.json(),
        json!([{"id": "fairist-core", "version": "1.0.0"}])
    );
    let doc = h
        .call(Method::GET, "/api/v1/schemas/fairist-core", None)
        .await;
    assert_eq!(doc.status, StatusCode::OK);
    let parsed = fairist_core::parse_schema(&doc.text()).unwrap();
    assert_eq!(&parsed, fairist_core::builtin_schema());
    let missing = h.call(Method::GET, "/api/v1/schemas/nope", None).await;
    assert_eq!(missing.status, StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_mutations_on_one_token_serialize() {
    let h = Arc::new(Harness::new());
    let token = h.create().await;
    let mut tasks = Vec::new();
    for i in 0..16 {
        let h = h.clone();
        let token = token.clone();
        tasks.push(tokio::spawn(async move {
            h.answer(&token, "q_project_name", json!(format!("name {i}")))
                .await
                .status
        }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
    let state = h
        .call(Method::GET, &format!("/api/v1/sessions/{token}"), None)
        .await;
    let name = state.json()["answers"]["q_project_name"]
        .as_str()
        .unwrap()
        .to_owned();
    assert!(name.starts_with("name "));
}
