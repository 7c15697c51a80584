use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use hypergame_server::{router, AppState, Defaults};

fn fixture(name: &str) -> String {
    let p = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn app() -> Router {
    router(AppState::new(Defaults {
        ks: Some(fixture("branching.ks")),
        formula: Some(fixture("two_rounds.hltl")),
        prophecies: None,
    }))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = serde_json::from_slice(&bytes).unwrap_or(Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, v)
}

async fn create(app: &Router, body: Value) -> String {
    let (s, v) = call(app, "POST", "/sessions", Some(body)).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    v["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn health() {
    let (s, v) = call(&app(), "GET", "/healthz", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, "ok");
}

#[tokio::test]
async fn create_view_and_move() {
    let app = app();
    let (s, v) = call(&app, "POST", "/sessions", Some(json!({"human_players": [2], "seed": 3}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["players"], 4);
    assert_eq!(v["coalition"], json!([2, 4]));
    assert_eq!(v["view"]["player"], 2);
    assert_eq!(v["view"]["your_turn"], true);
    let id = v["id"].as_str().unwrap();

    let (s, view) = call(&app, "GET", &format!("/sessions/{id}/view?player=2"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(view["legal"], json!(["A", "B"]));
    assert_eq!(view["copies"].as_array().unwrap().len(), 2);

    let (s, after) = call(&app, "POST", &format!("/sessions/{id}/move"), Some(json!({"player": 2, "direction": "B"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(after["transcript"][0]["direction"], "B");
    assert_eq!(after["transcript"][0]["engine"], false);
}

#[tokio::test]
async fn errors_have_the_documented_status() {
    let app = app();
    let id = create(&app, json!({"human_players": [2]})).await;
    let cases = [
        ("GET", format!("/sessions/{id}/view?player=1"), None, StatusCode::FORBIDDEN),
        ("GET", format!("/sessions/{id}/view"), None, StatusCode::BAD_REQUEST),
        ("POST", format!("/sessions/{id}/move"), Some(json!({"player": 4, "direction": "A"})), StatusCode::FORBIDDEN),
        ("POST", format!("/sessions/{id}/move"), Some(json!({"player": 2, "direction": "Z"})), StatusCode::BAD_REQUEST),
        ("POST", format!("/sessions/{id}/auto"), Some(json!({"player": 2})), StatusCode::BAD_REQUEST),
        ("GET", format!("/sessions/{id}/transcript"), None, StatusCode::FORBIDDEN),
        ("GET", "/sessions/s999/view?player=2".to_string(), None, StatusCode::NOT_FOUND),
        ("POST", "/sessions".to_string(), Some(json!({"human_players": [1]})), StatusCode::BAD_REQUEST),
        ("POST", "/sessions".to_string(), Some(json!({"opponent": "sly"})), StatusCode::BAD_REQUEST),
        ("POST", "/sessions".to_string(), Some(json!({"ks": "nonsense"})), StatusCode::BAD_REQUEST),
    ];
    for (m, uri, body, want) in cases {
        let (s, v) = call(&app, m, &uri, body).await;
        assert_eq!(s, want, "{m} {uri}: {v}");
        assert!(v["error"].is_string(), "{m} {uri}: {v}");
    }
}

#[tokio::test]
async fn missing_inputs_without_defaults() {
    let app = router(AppState::default());
    let (s, v) = call(&app, "POST", "/sessions", Some(json!({}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("ks"));
}

#[tokio::test]
async fn own_transcript_is_always_available() {
    let app = app();
    let id = create(&app, json!({"human_players": [2, 4]})).await;
    call(&app, "POST", &format!("/sessions/{id}/move"), Some(json!({"player": 2, "direction": "A"}))).await;
    let (s, v) = call(&app, "GET", &format!("/sessions/{id}/transcript?player=2"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["player"] == 2));
}

#[tokio::test]
async fn automated_session_releases_its_transcript() {
    let app = app();
    let id = create(&app, json!({"seed": 5, "horizon": 30})).await;
    let (s, t) = call(&app, "GET", &format!("/sessions/{id}/transcript"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(t["finished"], true);
    assert_eq!(t["rows"].as_array().unwrap().len(), 30);
    match t["cycle_color"].as_u64() {
        Some(c) => assert_eq!(t["coalition_wins"], c % 2 == 0),
        None => assert!(t["coalition_wins"].is_null()),
    }
}

#[tokio::test]
async fn seeded_sessions_are_reproducible() {
    let app = app();
    let a = create(&app, json!({"seed": 9, "horizon": 40})).await;
    let b = create(&app, json!({"seed": 9, "horizon": 40})).await;
    assert_ne!(a, b);
    let (_, ta) = call(&app, "GET", &format!("/sessions/{a}/transcript"), None).await;
    let (_, tb) = call(&app, "GET", &format!("/sessions/{b}/transcript"), None).await;
    assert_eq!(ta, tb);
}

#[tokio::test]
async fn views_leak_nothing_across_sessions() {
    // Same moves by player 2, different opponents: identical views as long
    // as player 2's observations coincide.
    let app = app();
    let mut views: std::collections::HashMap<String, String> = Default::default();
    for seed in 0..12 {
        let id = create(&app, json!({"human_players": [2], "seed": seed, "horizon": 16})).await;
        loop {
            let (_, v) = call(&app, "GET", &format!("/sessions/{id}/view?player=2"), None).await;
            let key = format!("{}|{}|{}", v["class"], v["round"], v["transcript"]);
            let text = v.to_string();
            assert!(!text.contains(&id));
            if let Some(prev) = views.insert(key, text.clone()) {
                assert_eq!(prev, text);
            }
            if v["finished"] == true {
                break;
            }
            call(&app, "POST", &format!("/sessions/{id}/move"), Some(json!({"player": 2, "direction": "A"}))).await;
        }
    }
}

#[tokio::test]
async fn certificate_engine_session() {
    let ks = fixture("branching.ks");
    let f = fixture("mirror.hltl");
    let k = hypergame::parse_ks(&ks).unwrap();
    let phi = hypergame::parse_hyperltl(&f).unwrap();
    let v = hypergame::solver::solve(&k, &phi, &Default::default()).unwrap();
    let cert = hypergame::certificate::export_profile(&v.witness.unwrap());
    let app = app();
    let id = create(
        &app,
        json!({"ks": ks, "formula": f, "human_players": [2], "certificate": cert, "opponent": "adversarial", "horizon": 20}),
    )
    .await;
    loop {
        let (s, v) = call(&app, "POST", &format!("/sessions/{id}/auto"), Some(json!({"player": 2}))).await;
        assert_eq!(s, StatusCode::OK, "{v}");
        if v["finished"] == true {
            break;
        }
    }
    let (s, t) = call(&app, "GET", &format!("/sessions/{id}/transcript"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(t["coalition_wins"], true);
    let (s, _) = call(&app, "POST", &format!("/sessions/{id}/auto"), Some(json!({"player": 2}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}
