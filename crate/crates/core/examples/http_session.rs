//! Drive the HTTP API in-process: upload, cut, generate, edit the timeline
//! and export, without opening a socket.
//!
//!     cargo run --example http_session

use axum::body::Body;
use axum::http::Request;
use dgcomics::graph::tri_fixture;
use dgcomics::io::{to_json_string, DatasetStore};
use dgcomics::narrative::CaptionTemplates;
use dgcomics::server::{router, AppState};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

async fn call(app: &axum::Router, uri: &str, body: String) -> (u16, String) {
    let req = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body))
        .unwrap();
    let r = app.clone().oneshot(req).await.unwrap();
    let status = r.status().as_u16();
    let bytes = r.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8_lossy(&bytes).into_owned())
}

#[tokio::main]
async fn main() {
    let dir = std::env::temp_dir().join("dgcomics-example-http");
    let app = router(AppState::new(DatasetStore::new(&dir), CaptionTemplates::default()));

    let (_, manifest) = call(&app, "/datasets", to_json_string(&tri_fixture())).await;
    let id = serde_json::from_str::<Value>(&manifest).unwrap()["id"].as_str().unwrap().to_owned();
    let (_, session) = call(&app, "/sessions", format!(r#"{{"dataset":"{id}"}}"#)).await;
    let sid = serde_json::from_str::<Value>(&session).unwrap()["id"].as_str().unwrap().to_owned();

    let (status, cut) = call(&app, &format!("/sessions/{sid}/cut"), r#"{"level":0.9}"#.into()).await;
    println!("cut {status}: {cut}");
    let (status, _) = call(&app, &format!("/sessions/{sid}/comic"), r#"{"top":100,"highlight":50}"#.into()).await;
    println!("comic {status}");
    let (status, tl) = call(
        &app,
        &format!("/sessions/{sid}/panels/1/timeline"),
        r#"{"mode":"replace","times":["1","2"]}"#.into(),
    )
    .await;
    let panels = &serde_json::from_str::<Value>(&tl).unwrap()["panels"];
    println!("timeline {status}: {panels}");
    let (status, stale) = call(&app, &format!("/sessions/{sid}/cut"), r#"{"k":2,"version":0}"#.into()).await;
    println!("stale edit {status}: {stale}");
    let (status, svg) = call(&app, &format!("/sessions/{sid}/export"), String::new()).await;
    println!("export {status}: {} bytes of SVG", svg.len());
}
