use std::convert::Infallible;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream};
use serde_json::error::Category;
use serde_json::json;

use seaweed_core::EventKind;

use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamOptions {
    /// Snapshots pushed per second on `/stream`.
    pub rate_hz: f64,
}

impl Default for StreamOptions {
    fn default() -> Self {
        Self { rate_hz: 10.0 }
    }
}

#[derive(Clone)]
struct AppState {
    world: Arc<World>,
    opts: StreamOptions,
}

pub fn router(world: Arc<World>, opts: StreamOptions) -> Router {
    Router::new()
        .route("/state", get(get_state))
        .route("/config", get(get_config))
        .route("/events", post(post_event))
        .route("/reset", post(post_reset))
        .route("/stream", get(stream))
        .with_state(AppState { world, opts })
}

fn error(status: StatusCode, kind: &str, message: impl std::fmt::Display) -> Response {
    (
        status,
        Json(json!({"error": kind, "message": message.to_string()})),
    )
        .into_response()
}

fn raw_json(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn get_state(State(app): State<AppState>) -> Response {
    raw_json(app.world.latest().json.clone())
}

async fn get_config(State(app): State<AppState>) -> Response {
    Json(app.world.config().clone()).into_response()
}

async fn post_event(State(app): State<AppState>, body: Bytes) -> Response {
    match serde_json::from_slice::<EventKind>(&body) {
        Ok(EventKind::Reset) => post_reset(State(app)).await,
        Ok(kind) => Json(app.world.enqueue(kind)).into_response(),
        Err(e) if e.classify() == Category::Data => {
            error(StatusCode::UNPROCESSABLE_ENTITY, "validation", e)
        }
        Err(e) => error(StatusCode::BAD_REQUEST, "malformed_json", e),
    }
}

async fn post_reset(State(app): State<AppState>) -> Response {
    match app.world.reset() {
        Ok(ack) => Json(ack).into_response(),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.kind(), e),
    }
}

async fn stream(State(app): State<AppState>) -> Sse<impl Stream<Item = Result<Event, Infallible>>> {
    let period = Duration::from_secs_f64(1.0 / app.opts.rate_hz.max(1e-3));
    let mut interval = tokio::time::interval(period);
    interval.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Skip);
    let rx = app.world.subscribe();
    let events = stream::unfold(
        (rx, interval, None::<u64>),
        |(rx, mut interval, last)| async move {
            loop {
                interval.tick().await;
                let snap = rx.borrow().clone();
                // a reset moves the tick backwards; anything else only forwards
                if last.is_some_and(|t| t == snap.tick) {
                    continue;
                }
                let event = Event::default().event("snapshot").data(snap.json.clone());
                return Some((Ok(event), (rx, interval, Some(snap.tick))));
            }
        },
    );
    Sse::new(events).keep_alive(KeepAlive::default())
}
