//! Black-box checks of the HTTP interface.

mod common;

use std::sync::Arc;

use fdo_core::bundled::helmholtz;
use fdo_core::record::serialize_record;
use fdo_core::TypeRegistry;
use serde_json::{json, Value};

use common::*;

async fn start() -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = fdo_core::service::router(Arc::new(energy_space()));
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    format!("http://{addr}")
}

fn new_record() -> Value {
    json!({"record": serialize_record(&valid_record(), &TypeRegistry::new())["record"]})
}

#[tokio::test]
async fn created_records_carry_a_location_header() {
    let base = start().await;
    let client = reqwest::Client::new();
    let r = client.post(format!("{base}/records")).json(&new_record()).send().await.unwrap();
    assert_eq!(r.status(), 201);
    let location = r.headers()["location"].to_str().unwrap().to_owned();
    let body: Value = r.json().await.unwrap();
    assert_eq!(location, format!("/records/{}", body["pid"].as_str().unwrap()));
    let fetched: Value = client.get(format!("{base}{location}")).send().await.unwrap().json().await.unwrap();
    assert_eq!(fetched["pid"], body["pid"]);

    let mut with_pid = new_record();
    with_pid["pid"] = json!("21.11152/chosen");
    let r = client.post(format!("{base}/records")).json(&with_pid).send().await.unwrap();
    assert_eq!(r.status(), 400);
}

#[tokio::test]
async fn validation_reports_violations() {
    let base = start().await;
    let client = reqwest::Client::new();
    let mut doc = new_record();
    doc["record"][helmholtz::DATE_CREATED] = json!("yesterday");
    let r = client.post(format!("{base}/records")).json(&doc).send().await.unwrap();
    assert_eq!(r.status(), 422);
    let body: Value = r.json().await.unwrap();
    assert_eq!(body["code"], "ValidationFailed");
    let codes: Vec<&str> =
        body["validation"]["violations"].as_array().unwrap().iter().map(|v| v["code"].as_str().unwrap()).collect();
    assert_eq!(codes, ["TypeMismatch"]);

    let r = client
        .post(format!("{base}/records/validate?profile={}", helmholtz::PROFILE))
        .json(&new_record())
        .send()
        .await
        .unwrap();
    let body: Value = r.json().await.unwrap();
    assert_eq!(body["valid"], true);
}

#[tokio::test]
async fn operations_listing_and_errors() {
    let base = start().await;
    let client = reqwest::Client::new();
    let p = pid("P");
    let url = format!("{base}/records/{}/{}/operations", p.prefix(), p.suffix());
    let body: Value = client.get(&url).send().await.unwrap().json().await.unwrap();
    let names: Vec<&str> = body["operations"].as_array().unwrap().iter().map(|o| o["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        ["evaluate_license", "geographic_filter", "get_digital_resource", "get_related_fdo", "timestamp_filter", "validate_checksum"]
    );
    let r = client.post(format!("{url}/geographic_filter")).json(&json!({"bbox": [8.0, 48.0, 9.0, 50.0]})).send().await.unwrap();
    let body: Value = r.json().await.unwrap();
    assert_eq!(body["status"], "match");
    let r = client.post(format!("{url}/unknown")).send().await.unwrap();
    assert_eq!(r.status(), 404);
    let a = pid("A");
    let r = client
        .post(format!("{base}/records/{}/{}/operations/timestamp_filter", a.prefix(), a.suffix()))
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), 409);
}

#[tokio::test]
async fn graph_formats_and_paths() {
    let base = start().await;
    let client = reqwest::Client::new();
    let body: Value = client.get(format!("{base}/graph")).send().await.unwrap().json().await.unwrap();
    assert_eq!(body["triples"].as_array().unwrap().len(), 11);
    let dot = client.get(format!("{base}/graph?format=dot")).send().await.unwrap().text().await.unwrap();
    assert!(dot.starts_with("digraph fdo {"));
    let body: Value = client
        .get(format!("{base}/graph/path?from={}&to={}", pid("A"), pid("C")))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(body["reachable"], false);
    let r = client.get(format!("{base}/graph/path?from=21.11152/none&to={}", pid("A"))).send().await.unwrap();
    assert_eq!(r.status(), 404);
}

#[tokio::test]
async fn conformance_accepts_batches() {
    let base = start().await;
    let batch: Value = serde_json::from_str(&format!(
        "[{},{},{}]",
        external_snapshot(PIDINST),
        external_snapshot(DARIAH),
        external_snapshot(DISSCO)
    ))
    .unwrap();
    let r = reqwest::Client::new().post(format!("{base}/conformance")).json(&batch).send().await.unwrap();
    let body: Value = r.json().await.unwrap();
    let overall: Vec<&Value> = body.as_array().unwrap().iter().map(|r| &r["overall"]).collect();
    assert_eq!(overall, [&json!(false), &json!(false), &json!(false)]);
}
