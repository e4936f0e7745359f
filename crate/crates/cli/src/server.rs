//! Local backend for the experiment UI.
//!
//! Sessions are validated with the core parser and persisted byte-for-byte
//! as received. Writes for the same participant are serialized; different
//! participants proceed concurrently.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sunlab_core::geometry::{mouse_gain, Aperture, ClipRegion, MouseGain, PointDeg, RayConfig, ScreenGeometry};
use sunlab_core::session::parse;
use sunlab_core::Condition;

use crate::commands::{schedule_json, sessions_dir, SESSION_SUFFIX};

/// Device travel that sweeps the full screen height.
pub const TRAVEL_CM: f64 = 3.5;
const MAX_SESSION_BYTES: usize = 64 * 1024 * 1024;

#[derive(Debug)]
pub struct AppState {
    pub data_dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl AppState {
    pub fn new(data_dir: impl Into<PathBuf>) -> Arc<Self> {
        Arc::new(Self { data_dir: data_dir.into(), locks: Mutex::default() })
    }

    fn lock_for(&self, participant: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.locks.lock().expect("lock table poisoned");
        locks.entry(participant.to_string()).or_default().clone()
    }
}

pub fn router(state: Arc<AppState>, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/schedule", get(schedule))
        .route("/api/v1/settings", get(settings))
        .route("/api/v1/sessions", post(post_session))
        .layer(DefaultBodyLimit::max(MAX_SESSION_BYTES))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(state: Arc<AppState>, addr: SocketAddr, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state, static_dir.as_deref()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn error(status: StatusCode, message: impl Into<String>, path: Option<&str>) -> Response {
    (status, Json(json!({ "error": message.into(), "path": path }))).into_response()
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

#[derive(Debug, Deserialize)]
pub struct ScheduleQuery {
    condition: Option<String>,
    seed: Option<u64>,
}

async fn schedule(Query(q): Query<ScheduleQuery>) -> Response {
    let Some(name) = q.condition else {
        return error(StatusCode::BAD_REQUEST, "missing query parameter `condition`", None);
    };
    match name.parse::<Condition>() {
        Ok(condition) => {
            let body = schedule_json(condition, q.seed.unwrap_or(0));
            ([(axum::http::header::CONTENT_TYPE, "application/json")], body).into_response()
        }
        Err(e) => error(StatusCode::BAD_REQUEST, e.to_string(), None),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Settings {
    pub ray_config: RayConfig,
    pub clip: ClipRegion,
    pub geometry: ScreenGeometry,
    pub gain: MouseGain,
}

#[derive(Debug, Deserialize)]
pub struct SettingsQuery {
    condition: Option<String>,
}

/// Rendering settings; with `?condition=` the clip carries that condition's
/// aperture mask.
pub fn settings_for(condition: Option<Condition>) -> Settings {
    let geometry = ScreenGeometry::default();
    let aperture = condition
        .filter(|c| c.masked())
        .map(|_| Aperture { center: PointDeg::ORIGIN, radius_deg: ClipRegion::APERTURE_RADIUS_DEG });
    Settings {
        ray_config: RayConfig::default(),
        clip: ClipRegion { aperture, ..ClipRegion::default() },
        geometry,
        gain: mouse_gain(&geometry, TRAVEL_CM),
    }
}

async fn settings(Query(q): Query<SettingsQuery>) -> Response {
    match q.condition.map(|c| c.parse::<Condition>()).transpose() {
        Ok(condition) => Json(settings_for(condition)).into_response(),
        Err(e) => error(StatusCode::BAD_REQUEST, e.to_string(), None),
    }
}

/// Keeps participant ids usable as file names.
fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

async fn post_session(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let log = match parse(&body) {
        Ok(log) => log,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string(), e.path()),
    };
    let participant = log.profile.participant_id.clone();
    let condition = log.condition().map_or("none", Condition::as_str);
    let lock = state.lock_for(&participant);
    let _guard = lock.lock().await;
    let dir = sessions_dir(&state.data_dir);
    if let Err(e) = tokio::fs::create_dir_all(&dir).await {
        return error(StatusCode::INTERNAL_SERVER_ERROR, format!("cannot create {}: {e}", dir.display()), None);
    }
    let stem = format!("{}-{condition}", file_stem(&participant));
    let mut n = 1;
    let path = loop {
        let candidate = dir.join(format!("{stem}-{n:03}{SESSION_SUFFIX}"));
        if !tokio::fs::try_exists(&candidate).await.unwrap_or(false) {
            break candidate;
        }
        n += 1;
    };
    let tmp = path.with_extension("part");
    let written = async {
        tokio::fs::write(&tmp, &body).await?;
        tokio::fs::rename(&tmp, &path).await
    };
    if let Err(e) = written.await {
        return error(StatusCode::INTERNAL_SERVER_ERROR, format!("cannot persist session: {e}"), None);
    }
    let file = path.file_name().map(|f| f.to_string_lossy().into_owned());
    (StatusCode::CREATED, Json(json!({ "participant_id": participant, "file": file, "trials": log.trials.len() })))
        .into_response()
}
