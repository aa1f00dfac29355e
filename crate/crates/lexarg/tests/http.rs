use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use lexarg::http::router;
use lexarg::service::SessionStore;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Api(Router);

impl Api {
    fn new() -> Self {
        Api(router(Arc::new(SessionStore::new())))
    }

    async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(uri);
        let body = match body {
            Some(v) => {
                req = req.header("content-type", "application/json");
                Body::from(v.to_string())
            }
            None => Body::empty(),
        };
        let res = self.0.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = res.status();
        let bytes = to_bytes(res.into_body(), usize::MAX).await.unwrap();
        let value = if bytes.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
        };
        (status, value)
    }

    async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.call(Method::GET, uri, None).await
    }

    async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::POST, uri, Some(body)).await
    }

    async fn delete(&self, uri: &str) -> (StatusCode, Value) {
        self.call(Method::DELETE, uri, None).await
    }

    async fn session(&self, bundled: &str) -> String {
        let (status, body) = self.post("/sessions", json!({ "bundled": bundled })).await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        body["id"].as_str().unwrap().to_string()
    }
}

fn cell<'a>(beliefs: &'a Value, argument: &str) -> &'a str {
    beliefs["beliefs"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["argument"] == argument)
        .unwrap_or_else(|| panic!("no {argument}"))["cell"]
        .as_str()
        .unwrap()
}

#[tokio::test]
async fn example1_session_walks_assume_and_retract() {
    let api = Api::new();
    let id = api.session("example1").await;
    let (status, b1) = api.get(&format!("/sessions/{id}/beliefs")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(cell(&b1, "Innocence"), "1");
    assert_eq!(cell(&b1, "E1"), "[0, 1]");

    let (status, state) =
        api.post(&format!("/sessions/{id}/assumptions"), json!({ "constraint": "p(E1) >= 0.9" })).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(state["status"], "ok");
    assert_eq!(state["assumption"]["id"], "a1");
    assert_eq!(state["beliefs"]["innocence"], json!({ "num": "1", "den": "10", "display": "0.1" }));

    let (_, v) = api.get(&format!("/sessions/{id}/verdict")).await;
    assert_eq!(v["class"], "guilty-by-inculpatory");
    let (_, v) = api.get(&format!("/sessions/{id}/verdict?threshold=19/20")).await;
    assert_eq!(v["class"], "lack-of-evidence");

    let (status, _) = api.delete(&format!("/sessions/{id}/assumptions/a1")).await;
    assert_eq!(status, StatusCode::OK);
    let (_, again) = api.get(&format!("/sessions/{id}/beliefs")).await;
    assert_eq!(again, b1);
}

#[tokio::test]
async fn conflicts_are_kept_and_answered_with_409() {
    let api = Api::new();
    let id = api.session("example1").await;
    let uri = format!("/sessions/{id}/assumptions");
    api.post(&uri, json!({ "constraint": "p(T3) >= 0.7" })).await;
    let (status, state) = api.post(&uri, json!({ "constraint": "p(E1) = 1" })).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(state["status"], "conflict");
    assert!(state.get("beliefs").is_none());
    assert_eq!(state["conflict"]["assumptions"], json!(["a1", "a2"]));

    let (status, body) = api.get(&format!("/sessions/{id}/beliefs")).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"]["kind"], "conflict");
    assert_eq!(body["conflict"]["assumptions"], json!(["a1", "a2"]));
    let (status, _) = api.get(&format!("/sessions/{id}/verdict")).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (_, session) = api.get(&format!("/sessions/{id}")).await;
    assert_eq!(session["status"], "conflict");
    assert_eq!(session["assumptions"].as_array().unwrap().len(), 2);

    api.delete(&format!("/sessions/{id}/assumptions/a2")).await;
    let (status, b) = api.get(&format!("/sessions/{id}/beliefs")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(cell(&b, "Eex"), "[0.7, 1]");
}

#[tokio::test]
async fn explanation_chains_through_sub_hypotheses() {
    let api = Api::new();
    let id = api.session("example1").await;
    api.post(&format!("/sessions/{id}/assumptions"), json!({ "constraint": "p(T3) >= 0.7", "id": "t3" })).await;
    let (status, e) = api.get(&format!("/sessions/{id}/explanation?argument=Eex&bound=lower&depth=2")).await;
    assert_eq!(status, StatusCode::OK, "{e}");
    assert_eq!(e["value"]["display"], "0.7");
    let reason = &e["reasons"][0];
    assert_eq!(reason["arguments"], json!(["T2"]));
    assert_eq!(reason["details"][0]["argument"], "T2");
    assert_eq!(reason["details"][0]["reasons"][0]["arguments"], json!(["T3"]));

    let (_, shallow) = api.get(&format!("/sessions/{id}/explanation?argument=Eex&bound=lower&depth=0")).await;
    assert_eq!(shallow["reasons"], json!([]));
    assert_eq!(shallow["value"], e["value"]);

    let (status, body) = api.get(&format!("/sessions/{id}/explanation?argument=Nobody")).await;
    assert_eq!(status, StatusCode::NOT_FOUND, "{body}");
    let (status, _) = api.get(&format!("/sessions/{id}/explanation?argument=Eex&bound=middle")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn example2_starts_with_fifteen_open_arguments() {
    let api = Api::new();
    let id = api.session("example2").await;
    let (_, b) = api.get(&format!("/sessions/{id}/beliefs")).await;
    let rows = b["beliefs"].as_array().unwrap();
    assert_eq!(rows.len(), 15);
    assert_eq!(b["innocence"]["display"], "1");
    for r in rows.iter().filter(|r| r["argument"] != "Innocence") {
        assert_eq!(r["cell"], "[0, 1]", "{r}");
    }
}

#[tokio::test]
async fn sessions_are_listed_isolated_and_deleted() {
    let api = Api::new();
    let a = api.session("example1").await;
    let b = api.session("example1").await;
    let (_, ids) = api.get("/sessions").await;
    assert_eq!(ids.as_array().unwrap().len(), 2);
    api.post(&format!("/sessions/{a}/assumptions"), json!({ "constraint": "p(E1) >= 0.9" })).await;
    let (_, bb) = api.get(&format!("/sessions/{b}/beliefs")).await;
    assert_eq!(cell(&bb, "Innocence"), "1");
    let (status, _) = api.delete(&format!("/sessions/{a}")).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, body) = api.get(&format!("/sessions/{a}")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["kind"], "not-found");
    let (status, _) = api.get("/sessions/not-a-uuid/beliefs").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn repeated_reads_are_identical() {
    let api = Api::new();
    let id = api.session("example2").await;
    api.post(&format!("/sessions/{id}/assumptions"), json!({ "constraint": "p(W1) = 1" })).await;
    let (_, first) = api.get(&format!("/sessions/{id}/beliefs")).await;
    let (_, second) = api.get(&format!("/sessions/{id}/beliefs")).await;
    assert_eq!(first, second);
}

#[tokio::test]
async fn bad_input_is_diagnosed() {
    let api = Api::new();
    let (status, body) = api.post("/sessions", json!({ "case": "schema = 1\n[[argument]]\nid = \n" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["kind"], "parse");
    assert_eq!(body["error"]["line"], 3);

    let (status, body) =
        api.post("/sessions", json!({ "case": "schema = 1\n[[argument]]\nid = \"E1\"\ntag = \"witness\"\n" })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["kind"], "validation");

    let (status, _) = api.post("/sessions", json!({ "bundled": "example1", "case": "schema = 1" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let id = api.session("example1").await;
    let (status, body) = api.post(&format!("/sessions/{id}/assumptions"), json!({ "constraint": "p(E1) >= " })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["kind"], "parse");
    assert!(body["error"]["column"].is_number());
    let (status, _) = api.delete(&format!("/sessions/{id}/assumptions/a9")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn documents_validate() {
    let api = Api::new();
    let (status, report) = api.post("/validate", json!({ "bundled": "example2" })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(report["valid"], true);
    assert_eq!(report["arguments"], 15);

    let (status, report) = api.post("/validate", json!({ "case": "schema = 3\n" })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(report["valid"], false);
    assert_eq!(report["errors"][0]["kind"], "parse");

    let (_, session) = api.post("/sessions", json!({ "bundled": "camera" })).await;
    let (status, report) = api.post("/validate", json!({ "document": session["document"] })).await;
    assert_eq!(status, StatusCode::OK, "{report}");
}

#[tokio::test]
async fn logs_come_as_json_or_jsonl() {
    let api = Api::new();
    let id = api.session("example1").await;
    api.post(&format!("/sessions/{id}/assumptions"), json!({ "constraint": "p(E1) >= 0.9" })).await;
    let (_, log) = api.get(&format!("/sessions/{id}/log")).await;
    let entries = log.as_array().unwrap();
    assert_eq!(entries[0]["action"], "solve");
    assert_eq!(entries[1]["action"], "assume");
    assert_eq!(entries[2]["innocence"]["den"], "10");
    let (status, text) = api.get(&format!("/sessions/{id}/log?format=jsonl")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(text.as_str().unwrap().lines().count(), 3);
    let (status, _) = api.get(&format!("/sessions/{id}/log?format=xml")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}
