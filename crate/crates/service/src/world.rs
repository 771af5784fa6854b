use std::io::Write;
use std::sync::{Arc, Mutex, MutexGuard};

use serde::{Deserialize, Serialize};
use tokio::sync::watch;

use seaweed_core::engine::write_trace;
use seaweed_core::{Engine, EngineConfig, Error, EventKind, Result, SimEvent};

/// Reply to an accepted event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ack {
    pub accepted: bool,
    /// Tick the event is applied at; it is visible in the first snapshot
    /// with a tick of at least `tick + 1`.
    pub tick: u64,
}

/// A snapshot frozen at publication time.
#[derive(Debug, Clone)]
pub struct Published {
    pub tick: u64,
    pub json: String,
}

struct Inner {
    engine: Engine,
    queue: Vec<EventKind>,
    recorder: Option<Box<dyn Write + Send>>,
}

pub struct World {
    inner: Mutex<Inner>,
    config: EngineConfig,
    tx: watch::Sender<Arc<Published>>,
}

fn publish(engine: &Engine) -> Arc<Published> {
    Arc::new(Published {
        tick: engine.state().tick,
        json: engine.snapshot().to_json(),
    })
}

impl World {
    pub fn new(engine: Engine) -> Self {
        let (tx, _) = watch::channel(publish(&engine));
        Self {
            config: engine.config().clone(),
            inner: Mutex::new(Inner {
                engine,
                queue: Vec::new(),
                recorder: None,
            }),
            tx,
        }
    }

    /// Appends every applied event to `w` as a JSON-lines trace.
    pub fn with_recorder(self, w: impl Write + Send + 'static) -> Self {
        self.lock().recorder = Some(Box::new(w));
        self
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        // a panic mid-update cannot leave the engine half-written: every
        // mutation happens inside Engine methods that finish or return Err
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// Queues `kind` for the current tick.
    pub fn enqueue(&self, kind: EventKind) -> Ack {
        let mut inner = self.lock();
        inner.queue.push(kind);
        Ack {
            accepted: true,
            tick: inner.engine.state().tick,
        }
    }

    /// Applies queued events in arrival order, advances one tick and
    /// publishes the new snapshot. Returns the new tick.
    pub fn pump(&self) -> Result<u64> {
        let mut inner = self.lock();
        let result = Self::drain(&mut inner);
        inner.engine.tick();
        self.tx.send_replace(publish(&inner.engine));
        result.map(|()| inner.engine.state().tick)
    }

    /// Applies anything queued, then resets the world to tick 0.
    pub fn reset(&self) -> Result<Ack> {
        let mut inner = self.lock();
        Self::drain(&mut inner)?;
        inner.queue.push(EventKind::Reset);
        Self::drain(&mut inner)?;
        self.tx.send_replace(publish(&inner.engine));
        Ok(Ack {
            accepted: true,
            tick: inner.engine.state().tick,
        })
    }

    fn drain(inner: &mut Inner) -> Result<()> {
        let tick = inner.engine.state().tick;
        let events: Vec<SimEvent> = inner
            .queue
            .drain(..)
            .map(|k| SimEvent::new(tick, k))
            .collect();
        if let Some(w) = inner.recorder.as_mut() {
            write_trace(&mut *w, &events)?;
            w.flush().map_err(|e| Error::io("<trace>", e))?;
        }
        for e in &events {
            inner.engine.apply_event(e)?;
        }
        Ok(())
    }

    pub fn latest(&self) -> Arc<Published> {
        self.tx.borrow().clone()
    }

    pub fn subscribe(&self) -> watch::Receiver<Arc<Published>> {
        self.tx.subscribe()
    }

    pub fn state_hash(&self) -> String {
        self.lock().engine.state_hash()
    }

    pub fn tick(&self) -> u64 {
        self.lock().engine.state().tick
    }
}
