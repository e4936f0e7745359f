use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use sunlab_cli::cli::AnalyzeArgs;
use sunlab_cli::commands::{run_analyze, sessions_dir};
use sunlab_cli::server::{router, AppState};
use sunlab_core::geometry::{generate_rays, TrialSchedule};
use sunlab_core::session::serialize;
use sunlab_core::simulator::{simulate_corpus, AgentModel};
use sunlab_core::{Execution, PointDeg};
use tower::ServiceExt;

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    (status, res.into_body().collect().await.unwrap().to_bytes().to_vec())
}

fn get(uri: &str) -> Request<Body> {
    Request::get(uri).body(Body::empty()).unwrap()
}

fn post(body: Vec<u8>) -> Request<Body> {
    Request::post("/api/v1/sessions").header("content-type", "application/json").body(Body::from(body)).unwrap()
}

fn sessions(label: &str, n: usize, seed: u64) -> Vec<Vec<u8>> {
    let agent = AgentModel::preset("sp-simpvl").unwrap();
    simulate_corpus(&agent, label, n, seed, Execution::Sequential).unwrap().iter().map(serialize).collect()
}

#[tokio::test]
async fn health_and_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(dir.path()), None);
    let (status, body) = call(&app, get("/api/v1/health")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["status"], "ok");

    let (status, body) = call(&app, get("/api/v1/schedule?condition=sp-simpvl&seed=7")).await;
    assert_eq!(status, StatusCode::OK);
    let schedule: TrialSchedule = serde_json::from_slice(&body).unwrap();
    assert_eq!(schedule.trials.len(), 24);
    assert_eq!(schedule.seed, 7);
    assert_eq!(body, sunlab_cli::commands::schedule_json(schedule.condition, 7));

    let (status, body) = call(&app, get("/api/v1/schedule?condition=nope")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(String::from_utf8_lossy(&body).contains("sp-simpvl"));
}

#[tokio::test]
async fn settings_carry_rays_clip_and_gain() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(dir.path()), None);
    let (status, body) = call(&app, get("/api/v1/settings")).await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(v["ray_config"]["num_rays"], 128);
    assert_eq!(v["clip"]["moving_area_radius_deg"], 15.0);
    assert!(v["clip"]["aperture"].is_null());
    assert!(v["gain"]["deg_per_count"].as_f64().unwrap() > 0.0);

    let (_, body) = call(&app, get("/api/v1/settings?condition=sp-simpvl")).await;
    let masked: sunlab_cli::server::Settings = serde_json::from_slice(&body).unwrap();
    assert_eq!(masked.clip.aperture.unwrap().radius_deg, 1.5);
    // the served settings reproduce the core ray field
    let rays = generate_rays(PointDeg::new(14.0, 0.0), &masked.ray_config, &masked.clip);
    assert!(!rays.is_empty() && rays.len() < 128);
}

#[tokio::test]
async fn posted_sessions_are_persisted_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(dir.path()), None);
    let body = sessions("web", 1, 3).remove(0);
    let (status, resp) = call(&app, post(body.clone())).await;
    assert_eq!(status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&resp));
    let v: Value = serde_json::from_slice(&resp).unwrap();
    let stored = sessions_dir(dir.path()).join(v["file"].as_str().unwrap());
    assert_eq!(std::fs::read(stored).unwrap(), body);
}

#[tokio::test]
async fn invalid_sessions_get_422_with_the_violation_path() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(dir.path()), None);
    let mut log: Value = serde_json::from_slice(&sessions("web", 1, 3)[0]).unwrap();
    let clicks = log["trials"][2]["click_events"].as_array_mut().unwrap();
    let last = clicks.last_mut().unwrap();
    last["pos"]["x"] = Value::from(0.6);
    last["pos"]["y"] = Value::from(0.0);
    let (status, resp) = call(&app, post(serde_json::to_vec(&log).unwrap())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let v: Value = serde_json::from_slice(&resp).unwrap();
    assert!(v["path"].as_str().unwrap().starts_with("$.trials[2]"), "{v}");
    assert!(v["error"].as_str().unwrap().contains("target"), "{v}");

    let (status, _) = call(&app, post(b"{not json".to_vec())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(!sessions_dir(dir.path()).exists());
}

#[tokio::test]
async fn concurrent_uploads_never_clobber_each_other() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(dir.path()), None);
    // the same participant uploading several times plus other participants
    let same = sessions("same", 1, 4).remove(0);
    let mut bodies: Vec<Vec<u8>> = vec![same.clone(); 6];
    bodies.extend(sessions("other", 6, 5));
    let handles: Vec<_> = bodies
        .into_iter()
        .map(|b| {
            let app = app.clone();
            tokio::spawn(async move { call(&app, post(b)).await.0 })
        })
        .collect();
    for h in handles {
        assert_eq!(h.await.unwrap(), StatusCode::CREATED);
    }
    let files: Vec<_> = std::fs::read_dir(sessions_dir(dir.path())).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 12);
    let copies = files.iter().filter(|f| std::fs::read(f).unwrap() == same).count();
    assert_eq!(copies, 6);
}

#[tokio::test]
async fn posted_session_appears_in_the_next_report() {
    let dir = tempfile::tempdir().unwrap();
    let state = AppState::new(dir.path());
    let app = router(Arc::clone(&state), None);
    for body in sessions("lab", 2, 8) {
        assert_eq!(call(&app, post(body)).await.0, StatusCode::CREATED);
    }
    let args = AnalyzeArgs {
        inputs: vec![],
        out_dir: None,
        config: None,
        include_aborted: false,
        exact_threshold: None,
        strict: true,
        plot: false,
        sequential: false,
    };
    let done = run_analyze(&state.data_dir, &args).unwrap();
    assert_eq!(done.bundle.n_sessions, 2);
    let ids: std::collections::BTreeSet<_> = done.bundle.trials.iter().map(|t| t.participant_id.as_str()).collect();
    assert_eq!(ids.into_iter().collect::<Vec<_>>(), ["lab-p01", "lab-p02"]);
}

#[tokio::test]
async fn static_assets_are_served_when_configured() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>ui</html>").unwrap();
    let app = router(AppState::new(dir.path().join("data")), Some(dir.path()));
    let (status, body) = call(&app, get("/index.html")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"<html>ui</html>");
    assert_eq!(call(&app, get("/api/v1/health")).await.0, StatusCode::OK);
}
