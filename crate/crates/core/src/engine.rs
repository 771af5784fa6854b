//! Fixed-timestep world loop.
//!
//! State is a pure function of (config, event trace, tick count). Events for
//! tick `t` are applied while `state.tick == t`, then [`Engine::tick`]
//! advances the world to `t + 1`. Every source of randomness is derived from
//! the master seed plus a purpose tag and a counter, so subsystems never
//! share a stream.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ecology::{EcoConfig, EcoState};
use crate::economy::{SettlementConfig, TokenLedger};
use crate::error::{Error, Result};
use crate::fungigen::{generate_fungus, FungiConfig, FungusTree};
use crate::genmodel::{shape_from_yields_weighted, yields_from_factors, ModelSet, ShapeParams};
use crate::noise::SplitMix64;
use crate::pathology::{PathologyConfig, PathologyState};
use crate::snapshot::Snapshot;
use crate::swarm::{price_of, Sprout, SwarmConfig, SwarmState};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub schema_version: u32,
    /// Seconds per tick.
    pub dt: f64,
    /// Master seed.
    pub seed: u64,
    pub ecology: EcoConfig,
    pub swarm: SwarmConfig,
    pub settlement: SettlementConfig,
    pub pathology: PathologyConfig,
    pub fungi: FungiConfig,
    /// Directory holding `<factor>.json` yield models. Bundled models when absent.
    pub models_dir: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            dt: 0.1,
            seed: 0x5EA_BEEF,
            ecology: EcoConfig::default(),
            swarm: SwarmConfig::default(),
            settlement: SettlementConfig::default(),
            pathology: PathologyConfig::default(),
            fungi: FungiConfig::default(),
            models_dir: None,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported config schema version {}",
                self.schema_version
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        self.settlement_ticks()?;
        self.ecology.validate()?;
        self.swarm.validate()?;
        self.pathology.validate()?;
        self.fungi.validate()
    }

    /// Settlement period in ticks; the period must be a whole number of ticks.
    pub fn settlement_ticks(&self) -> Result<u64> {
        let ratio = self.settlement.period / self.dt;
        let whole = ratio.round();
        if !(ratio.is_finite() && whole >= 1.0 && (ratio - whole).abs() <= 1e-9 * whole) {
            return Err(Error::Config(format!(
                "settlement period {} s is not a positive multiple of dt {} s",
                self.settlement.period, self.dt
            )));
        }
        Ok(whole as u64)
    }

    /// Reads a JSON config; a relative `models_dir` is resolved against the
    /// config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let (Some(dir), Some(parent)) = (cfg.models_dir.as_ref(), path.parent()) {
            if dir.is_relative() {
                cfg.models_dir = Some(parent.join(dir));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load_models(&self) -> Result<ModelSet> {
        match &self.models_dir {
            Some(dir) => ModelSet::load_dir(dir),
            None => Ok(ModelSet::bundled()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Seaweed,
    Fungi,
}

impl Target {
    pub fn toggled(self) -> Self {
        match self {
            Target::Seaweed => Target::Fungi,
            Target::Fungi => Target::Seaweed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventKind {
    InsertToken { target: Target },
    SwitchTarget,
    Reset,
}

/// An input event quantized to a tick. Serialized flat, one per trace line:
/// `{"tick":12,"kind":"insert_token","target":"seaweed"}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimEvent {
    pub tick: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl SimEvent {
    pub fn new(tick: u64, kind: EventKind) -> Self {
        Self { tick, kind }
    }

    pub fn seaweed(tick: u64) -> Self {
        Self::new(
            tick,
            EventKind::InsertToken {
                target: Target::Seaweed,
            },
        )
    }

    pub fn fungi(tick: u64) -> Self {
        Self::new(
            tick,
            EventKind::InsertToken {
                target: Target::Fungi,
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub tick: u64,
    pub sim_time: f64,
    pub eco: EcoState,
    pub swarm: SwarmState,
    pub pathology: PathologyState,
    pub ledger: TokenLedger,
    pub current_target: Target,
    pub fungi_gallery: Vec<FungusTree>,
    pub rng_seed: u64,
}

impl SimState {
    /// Canonical serialization used for hashing and replay comparison.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("state serializes")
    }

    /// Hex SHA-256 of [`SimState::canonical_json`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Purpose tags for derived seeds.
#[derive(Debug, Clone, Copy)]
enum Stream {
    Disease = 1,
    Fungus = 2,
}

fn derive_seed(master: u64, stream: Stream, index: u64) -> u64 {
    let base =
        SplitMix64::new(master ^ (stream as u64).wrapping_mul(0xA076_1D64_78BD_642F)).next_u64();
    SplitMix64::new(base ^ index).next_u64()
}

/// What an applied event did, for callers that report it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventOutcome {
    pub harvested: Option<(u64, f64)>,
    pub cycle_wrapped: bool,
    pub reseeded: bool,
    pub oomycete_killed: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TickOutcome {
    pub settled: Option<u64>,
    pub oomycete_spawned: bool,
}

pub struct Engine {
    config: EngineConfig,
    models: ModelSet,
    settle_every: u64,
    state: SimState,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        config.validate()?;
        let models = config.load_models()?;
        Self::with_models(config, models)
    }

    pub fn with_models(config: EngineConfig, models: ModelSet) -> Result<Self> {
        config.validate()?;
        models.require_complete()?;
        let settle_every = config.settlement_ticks()?;
        let state = initial_state(&config, &models)?;
        Ok(Self {
            config,
            models,
            settle_every,
            state,
        })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn models(&self) -> &ModelSet {
        &self.models
    }

    pub fn state_hash(&self) -> String {
        self.state.hash()
    }

    /// Seconds until the next settlement, in `(0, period]`.
    pub fn settlement_countdown(&self) -> f64 {
        let left = self.settle_every - self.state.tick % self.settle_every;
        left as f64 * self.config.dt
    }

    /// Shape a plant spawned right now would get.
    pub fn current_shape(&self) -> ShapeParams {
        spawn_shape(&self.models, &self.config, &self.state.eco)
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot::capture(self)
    }

    pub fn apply_event(&mut self, event: &SimEvent) -> Result<EventOutcome> {
        if event.tick != self.state.tick {
            return Err(Error::Sequencing {
                event_tick: event.tick,
                state_tick: self.state.tick,
            });
        }
        let mut out = EventOutcome::default();
        match event.kind {
            EventKind::InsertToken {
                target: Target::Seaweed,
            } => {
                self.insert_seaweed(&mut out)?;
            }
            EventKind::InsertToken {
                target: Target::Fungi,
            } => {
                self.insert_fungi(&mut out);
            }
            EventKind::SwitchTarget => {
                self.state.current_target = self.state.current_target.toggled();
            }
            EventKind::Reset => {
                self.state = initial_state(&self.config, &self.models)?;
            }
        }
        Ok(out)
    }

    fn insert_seaweed(&mut self, out: &mut EventOutcome) -> Result<()> {
        let cfg = &self.config;
        let st = &mut self.state;
        st.ledger.inserted_seaweed += 1;
        out.cycle_wrapped = st.eco.advance(&cfg.ecology);

        if st.swarm.extinct && st.eco.ei > 0.0 {
            let shape = spawn_shape(&self.models, cfg, &st.eco);
            st.swarm.extinct = false;
            for _ in 0..cfg.swarm.reseed_juveniles {
                let seed = derive_seed(st.rng_seed, Stream::Disease, st.swarm.next_id);
                let sprout = Sprout {
                    shape,
                    disease_seed: seed,
                };
                st.swarm
                    .plant(sprout, 0.0, st.pathology.swarm_health, st.tick);
            }
            out.reseeded = true;
        }

        if let Some(plant) = st.swarm.harvest(st.eco.stage) {
            let price = price_of(&plant, &cfg.swarm.price, cfg.swarm.full_price);
            st.ledger.record_harvest(price)?;
            out.harvested = Some((plant.id, price));
        }
        Ok(())
    }

    fn insert_fungi(&mut self, out: &mut EventOutcome) {
        let cfg = &self.config;
        let st = &mut self.state;
        let index = st.ledger.inserted_fungi;
        st.ledger.inserted_fungi += 1;

        let species = cfg.fungi.species_for_cultivation(index);
        let tree = generate_fungus(species, derive_seed(st.rng_seed, Stream::Fungus, index));
        st.fungi_gallery.push(tree);
        let excess = st
            .fungi_gallery
            .len()
            .saturating_sub(cfg.fungi.gallery_limit);
        st.fungi_gallery.drain(..excess);

        let range = cfg.ecology.ei_range();
        out.oomycete_killed = st
            .pathology
            .cultivate_fungus(st.eco.ei, range, &cfg.pathology);
    }

    pub fn tick(&mut self) -> TickOutcome {
        let cfg = &self.config;
        let models = &self.models;
        let st = &mut self.state;
        st.tick += 1;
        st.sim_time = st.tick as f64 * cfg.dt;

        let ei = st.eco.ei;
        let master = st.rng_seed;
        let eco = &st.eco;
        let mut shape = None;
        st.swarm.growth_step(
            ei,
            cfg.dt,
            &cfg.swarm,
            st.tick,
            st.pathology.swarm_health,
            |id| Sprout {
                shape: *shape.get_or_insert_with(|| spawn_shape(models, cfg, eco)),
                disease_seed: derive_seed(master, Stream::Disease, id),
            },
        );

        let range = cfg.ecology.ei_range();
        let mut out = TickOutcome {
            oomycete_spawned: st.pathology.tick(ei, cfg.dt, range, &cfg.pathology),
            ..Default::default()
        };
        st.swarm.set_health(st.pathology.swarm_health);

        if st.tick.is_multiple_of(self.settle_every) {
            out.settled = Some(st.ledger.settle());
        }
        out
    }

    /// Applies `events` (all for the current tick, in order) then ticks once.
    pub fn step(&mut self, events: &[SimEvent]) -> Result<TickOutcome> {
        for e in events {
            self.apply_event(e)?;
        }
        Ok(self.tick())
    }
}

fn spawn_shape(models: &ModelSet, cfg: &EngineConfig, eco: &EcoState) -> ShapeParams {
    let yields =
        yields_from_factors(models, &eco.factors).expect("complete model set on finite factors");
    shape_from_yields_weighted(&yields, cfg.swarm.stipe_irradiation_weight)
}

fn initial_state(cfg: &EngineConfig, models: &ModelSet) -> Result<SimState> {
    let eco = EcoState::new(&cfg.ecology);
    let range = cfg.ecology.ei_range();
    let pathology = PathologyState::new(eco.ei, range, &cfg.pathology);
    let mut swarm = SwarmState::new(cfg.swarm.capacity);
    let shape = spawn_shape(models, cfg, &eco);
    for _ in 0..cfg.swarm.initial_plants {
        let sprout = Sprout {
            shape,
            disease_seed: derive_seed(cfg.seed, Stream::Disease, swarm.next_id),
        };
        swarm.plant(sprout, 1.0, pathology.swarm_health, 0);
    }
    Ok(SimState {
        tick: 0,
        sim_time: 0.0,
        eco,
        swarm,
        pathology,
        ledger: TokenLedger::default(),
        current_target: Target::Seaweed,
        fungi_gallery: Vec::new(),
        rng_seed: cfg.seed,
    })
}

// ---------------------------------------------------------------------------
// Traces and replay
// ---------------------------------------------------------------------------

/// Checks that ticks never decrease between resets.
pub fn validate_trace(trace: &[SimEvent]) -> Result<()> {
    let mut last = 0;
    for (i, e) in trace.iter().enumerate() {
        if e.tick < last {
            return Err(Error::Input(format!(
                "trace line {} has tick {} after tick {last}",
                i + 1,
                e.tick
            )));
        }
        last = if e.kind == EventKind::Reset {
            0
        } else {
            e.tick
        };
    }
    Ok(())
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<SimEvent>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_trace(std::io::BufReader::new(file))
}

pub fn parse_trace(reader: impl BufRead) -> Result<Vec<SimEvent>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<trace>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let event: SimEvent = serde_json::from_str(&line)
            .map_err(|e| Error::Input(format!("trace line {}: {e}", i + 1)))?;
        out.push(event);
    }
    Ok(out)
}

pub fn write_trace(mut w: impl Write, trace: &[SimEvent]) -> Result<()> {
    for e in trace {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n").map_err(|e| Error::io("<trace>", e))?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ReplayOutput {
    pub final_state: SimState,
    pub final_hash: String,
    pub snapshots: Vec<Snapshot>,
}

/// Replays `trace` and runs until `state.tick == ticks`.
///
/// A `Reset` event restarts the tick counter, so ticks after it are
/// relative to the reset. `ticks` applies to the segment after the last
/// reset. With `snapshot_every = Some(k)` a snapshot is kept after every
/// tick divisible by `k`.
pub fn run_replay(
    config: &EngineConfig,
    trace: &[SimEvent],
    ticks: u64,
    snapshot_every: Option<u64>,
) -> Result<ReplayOutput> {
    replay_with(Engine::new(config.clone())?, trace, ticks, snapshot_every)
}

pub fn replay_with(
    mut engine: Engine,
    trace: &[SimEvent],
    ticks: u64,
    snapshot_every: Option<u64>,
) -> Result<ReplayOutput> {
    validate_trace(trace)?;
    let last_segment = trace
        .iter()
        .rposition(|e| e.kind == EventKind::Reset)
        .map_or(trace, |i| &trace[i + 1..]);
    if let Some(max) = last_segment.iter().map(|e| e.tick).max() {
        if max > ticks {
            return Err(Error::Input(format!(
                "trace has events at tick {max} beyond the requested {ticks} ticks"
            )));
        }
    }
    if snapshot_every == Some(0) {
        return Err(Error::Input("snapshot interval must be positive".into()));
    }

    let mut snapshots = Vec::new();
    let mut advance = |engine: &mut Engine| {
        engine.tick();
        if let Some(k) = snapshot_every {
            if engine.state.tick.is_multiple_of(k) {
                snapshots.push(engine.snapshot());
            }
        }
    };
    for e in trace {
        while engine.state.tick < e.tick {
            advance(&mut engine);
        }
        engine.apply_event(e)?;
    }
    while engine.state.tick < ticks {
        advance(&mut engine);
    }
    Ok(ReplayOutput {
        final_hash: engine.state_hash(),
        final_state: engine.state,
        snapshots,
    })
}
