//! Scripted token-insertion policies and headless time-series runs.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ecology::Stage;
use crate::engine::{Engine, EngineConfig, EventKind, SimEvent, SimState, Target};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScriptedEvent {
    /// Simulation time in seconds.
    pub time: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// Either explicit timed events or periodic insertion rates.
///
/// Rates place insertions at exact multiples of `60 / rate` seconds starting
/// at `t = 0`, so runs are deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyScript {
    Script {
        events: Vec<ScriptedEvent>,
    },
    Rate {
        #[serde(default)]
        seaweed_per_min: f64,
        #[serde(default)]
        fungi_per_min: f64,
        /// Seconds the rule stays active; the whole run when absent.
        #[serde(default)]
        duration: Option<f64>,
    },
}

impl PolicyScript {
    pub fn rate(seaweed_per_min: f64, fungi_per_min: f64) -> Self {
        PolicyScript::Rate {
            seaweed_per_min,
            fungi_per_min,
            duration: None,
        }
    }

    pub fn idle() -> Self {
        Self::rate(0.0, 0.0)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let policy: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Input(format!("policy {}: {e}", path.display())))?;
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PolicyScript::Script { events } => {
                if events
                    .iter()
                    .any(|e| !(e.time >= 0.0 && e.time.is_finite()))
                {
                    return Err(Error::Input(
                        "policy event times must be non-negative".into(),
                    ));
                }
                if events.windows(2).any(|w| w[1].time < w[0].time) {
                    return Err(Error::Input("policy event times must be sorted".into()));
                }
            }
            PolicyScript::Rate {
                seaweed_per_min,
                fungi_per_min,
                duration,
            } => {
                let rates = [*seaweed_per_min, *fungi_per_min];
                if rates.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
                    return Err(Error::Input("policy rates must be non-negative".into()));
                }
                if duration.is_some_and(|d| !(d >= 0.0)) {
                    return Err(Error::Input("policy duration must be non-negative".into()));
                }
            }
        }
        Ok(())
    }

    /// Quantizes the policy into a sorted event trace covering `[0, run_seconds)`.
    pub fn to_trace(&self, dt: f64, run_seconds: f64) -> Result<Vec<SimEvent>> {
        self.validate()?;
        let to_tick = |t: f64| (t / dt).round() as u64;
        let end_tick = to_tick(run_seconds);
        let mut events: Vec<SimEvent> = match self {
            PolicyScript::Script { events } => events
                .iter()
                .map(|e| SimEvent::new(to_tick(e.time), e.kind))
                .collect(),
            PolicyScript::Rate {
                seaweed_per_min,
                fungi_per_min,
                duration,
            } => {
                let horizon = duration.map_or(run_seconds, |d| d.min(run_seconds));
                let periodic = |rate: f64, target: Target| -> Vec<SimEvent> {
                    if rate <= 0.0 {
                        return Vec::new();
                    }
                    let period = 60.0 / rate;
                    (0u64..)
                        .map(|k| k as f64 * period)
                        .take_while(|t| *t < horizon)
                        .map(|t| SimEvent::new(to_tick(t), EventKind::InsertToken { target }))
                        .collect()
                };
                let mut all = periodic(*seaweed_per_min, Target::Seaweed);
                all.extend(periodic(*fungi_per_min, Target::Fungi));
                all
            }
        };
        // stable: same-tick events keep seaweed-before-fungi / script order
        events.sort_by_key(|e| e.tick);
        events.retain(|e| e.tick < end_tick);
        Ok(events)
    }
}

/// One sampled row of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub tick: u64,
    pub ei: f64,
    pub stage: Stage,
    pub plants: usize,
    pub health: f64,
    pub inserted: u64,
    pub dispensed: u64,
    #[serde(skip)]
    pub extinct: bool,
}

impl SeriesRow {
    fn sample(st: &SimState) -> Self {
        Self {
            tick: st.tick,
            ei: st.eco.ei,
            stage: st.eco.stage,
            plants: st.swarm.plants.len(),
            health: st.pathology.swarm_health,
            inserted: st.ledger.inserted_seaweed + st.ledger.inserted_fungi,
            dispensed: st.ledger.dispensed,
            extinct: st.swarm.extinct,
        }
    }
}

pub const CSV_HEADER: &str = "tick,ei,stage,plants,health,inserted,dispensed";

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub rows: Vec<SeriesRow>,
    pub trace: Vec<SimEvent>,
    pub final_state: SimState,
    pub final_hash: String,
}

impl SimulationOutput {
    /// CSV with the frozen column order of [`CSV_HEADER`].
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.tick,
                r.ei,
                r.stage.as_str(),
                r.plants,
                r.health,
                r.inserted,
                r.dispensed
            );
        }
        out
    }
}

/// Runs `policy` for `duration` seconds, sampling every `sample_every` ticks
/// (tick 0 included).
pub fn simulate(
    config: &EngineConfig,
    policy: &PolicyScript,
    duration: f64,
    sample_every: u64,
) -> Result<SimulationOutput> {
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::Input(format!(
            "duration must be non-negative, got {duration}"
        )));
    }
    if sample_every == 0 {
        return Err(Error::Input("sample interval must be positive".into()));
    }
    let mut engine = Engine::new(config.clone())?;
    let ticks = (duration / config.dt).round() as u64;
    let trace = policy.to_trace(config.dt, duration)?;

    let mut rows = vec![SeriesRow::sample(engine.state())];
    let mut pending = trace.iter().peekable();
    while engine.state().tick < ticks {
        while let Some(e) = pending.next_if(|e| e.tick == engine.state().tick) {
            engine.apply_event(e)?;
        }
        engine.tick();
        if engine.state().tick % sample_every == 0 {
            rows.push(SeriesRow::sample(engine.state()));
        }
    }
    Ok(SimulationOutput {
        rows,
        final_hash: engine.state_hash(),
        final_state: engine.state().clone(),
        trace,
    })
}
