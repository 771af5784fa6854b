//! Network boundary for a single world.
//!
//! Handlers never touch the engine directly: events go into a queue that
//! [`World::pump`] drains once per tick, and clients read immutable,
//! pre-serialized snapshots published on a watch channel. A slow stream
//! client only ever sees the latest snapshot, so it cannot hold the engine
//! back.
//!
//! | method | path      | body / response                                   |
//! |--------|-----------|---------------------------------------------------|
//! | GET    | `/state`  | latest snapshot                                   |
//! | GET    | `/config` | engine configuration                              |
//! | POST   | `/events` | `{"kind":"insert_token","target":"seaweed"}` → ack |
//! | POST   | `/reset`  | ack with tick 0                                   |
//! | GET    | `/stream` | server-sent events, one snapshot per `data:` line  |

mod routes;
mod world;

pub use routes::{router, StreamOptions};
pub use world::{Ack, Published, World};

use std::future::Future;
use std::sync::Arc;
use std::time::Duration;

use tokio::net::TcpListener;

/// Pumps `world` once per `dt` of wall-clock time, forever.
pub async fn run_clock(world: Arc<World>) {
    let dt = Duration::from_secs_f64(world.config().dt);
    let mut interval = tokio::time::interval(dt);
    interval.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    loop {
        interval.tick().await;
        if let Err(e) = world.pump() {
            // an event the engine rejects is dropped; the clock keeps going
            eprintln!(
                "{}",
                serde_json::json!({"error": e.kind(), "message": e.to_string()})
            );
        }
    }
}

/// Serves the API on `listener` with a real-time clock until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    world: Arc<World>,
    opts: StreamOptions,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let clock = tokio::spawn(run_clock(world.clone()));
    let result = axum::serve(listener, router(world, opts))
        .with_graceful_shutdown(shutdown)
        .await;
    clock.abort();
    result
}
