//! HTTP calibration API with a server-sent-event push channel.
//!
//! Every mutation publishes the full session snapshot while the session lock
//! is still held, so subscribers observe snapshots in mutation order.

use std::convert::Infallible;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream, StreamExt};
use serde::{Deserialize, Serialize};
use tokio::sync::{broadcast, Mutex};
use tokio_stream::wrappers::BroadcastStream;
use tower_http::services::ServeDir;

use singingbot_core::calibration::{CalibrationSession, ExportFormat, PreviewRequest, Snapshot};

const PLACEHOLDER: &str = "<!doctype html><title>singingbot calibration</title>\
<p>No UI bundle configured. Start with <code>--ui-dir</code> or use the JSON API under \
<code>/api</code>.</p>";

#[derive(Clone)]
pub struct AppState {
    session: Arc<Mutex<CalibrationSession>>,
    updates: broadcast::Sender<Snapshot>,
}

impl AppState {
    pub fn new(session: CalibrationSession) -> Self {
        let (updates, _) = broadcast::channel(64);
        Self {
            session: Arc::new(Mutex::new(session)),
            updates,
        }
    }

    pub fn subscribe(&self) -> broadcast::Receiver<Snapshot> {
        self.updates.subscribe()
    }

    async fn mutate<T>(
        &self,
        f: impl FnOnce(&mut CalibrationSession) -> singingbot_core::Result<T>,
    ) -> Result<Snapshot, ApiError> {
        let mut s = self.session.lock().await;
        f(&mut s)?;
        let snap = s.snapshot();
        // no subscribers is fine
        let _ = self.updates.send(snap.clone());
        Ok(snap)
    }
}

pub struct ApiError(StatusCode, String);

impl From<singingbot_core::Error> for ApiError {
    fn from(e: singingbot_core::Error) -> Self {
        ApiError(StatusCode::BAD_REQUEST, e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(ErrorBody { error: self.1 })).into_response()
    }
}

#[derive(Debug, Deserialize)]
pub struct SetActuator {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Deserialize)]
pub struct Select {
    pub semantic: String,
    pub intensity: f64,
}

#[derive(Debug, Serialize)]
pub struct Preview {
    pub actuators: Vec<f64>,
}

#[derive(Debug, Deserialize)]
pub struct ExportQuery {
    #[serde(default)]
    pub format: ExportFormat,
}

/// Routes under `/api`, plus the UI bundle (or a placeholder page) at `/`.
pub fn router(state: AppState, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/state", get(get_state))
        .route("/api/actuator", post(set_actuator))
        .route("/api/reset", post(reset))
        .route("/api/select", post(select))
        .route("/api/preview", post(preview))
        .route("/api/anchor", post(save_anchor))
        .route("/api/export", get(export))
        .route("/api/events", get(events))
        .with_state(state);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER) })),
    }
}

async fn get_state(State(st): State<AppState>) -> Json<Snapshot> {
    Json(st.session.lock().await.snapshot())
}

async fn set_actuator(
    State(st): State<AppState>,
    Json(req): Json<SetActuator>,
) -> Result<Json<Snapshot>, ApiError> {
    Ok(Json(
        st.mutate(|s| s.set_actuator(req.index, req.value)).await?,
    ))
}

async fn reset(State(st): State<AppState>) -> Result<Json<Snapshot>, ApiError> {
    Ok(Json(
        st.mutate(|s| {
            s.reset();
            Ok(())
        })
        .await?,
    ))
}

async fn select(
    State(st): State<AppState>,
    Json(req): Json<Select>,
) -> Result<Json<Snapshot>, ApiError> {
    Ok(Json(
        st.mutate(|s| s.select(&req.semantic, req.intensity))
            .await?,
    ))
}

async fn preview(
    State(st): State<AppState>,
    Json(req): Json<PreviewRequest>,
) -> Result<Json<Preview>, ApiError> {
    let m = st.session.lock().await.preview(&req)?;
    Ok(Json(Preview {
        actuators: m.into_inner(),
    }))
}

async fn save_anchor(State(st): State<AppState>) -> Result<Json<Snapshot>, ApiError> {
    Ok(Json(st.mutate(|s| s.save_anchor()).await?))
}

async fn export(
    State(st): State<AppState>,
    Query(q): Query<ExportQuery>,
) -> Result<Response, ApiError> {
    let text = st.session.lock().await.export_profile(q.format)?;
    let mime = match q.format {
        ExportFormat::Yaml => "application/yaml",
        ExportFormat::Json => "application/json",
    };
    Ok(([(header::CONTENT_TYPE, mime)], text).into_response())
}

fn snapshot_event(s: &Snapshot) -> Event {
    Event::default()
        .event("snapshot")
        .json_data(s)
        .expect("snapshots serialize")
}

/// Current snapshot first, then one event per mutation. A subscriber that
/// falls behind skips to newer snapshots; each one carries the full state.
async fn events(State(st): State<AppState>) -> Sse<impl Stream<Item = Result<Event, Infallible>>> {
    // subscribe before reading so no mutation falls between the two
    let rx = st.updates.subscribe();
    let current = st.session.lock().await.snapshot();
    let updates = BroadcastStream::new(rx).filter_map(|r| async move { r.ok() });
    let stream = stream::once(async move { current })
        .chain(updates)
        .map(|s| Ok(snapshot_event(&s)));
    Sse::new(stream).keep_alive(KeepAlive::default())
}
