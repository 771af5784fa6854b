//! Seaweed population: spawning, EI-proportional growth, pricing and harvest.

use serde::{Deserialize, Serialize};

use crate::ecology::Stage;
use crate::error::{Error, Result};
use crate::genmodel::ShapeParams;
use crate::geometry::{direction, offset, GeometryDescriptor, Outline, Segment};
use crate::noise::SplitMix64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeaweedPlant {
    pub id: u64,
    pub shape: ShapeParams,
    pub maturity: f64,
    pub health: f64,
    pub spawn_tick: u64,
    pub disease_seed: u64,
}

impl SeaweedPlant {
    pub fn is_mature(&self) -> bool {
        self.maturity >= 1.0
    }
}

/// Price weights over the four shape components plus the disease penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PriceWeights {
    pub w_width: f64,
    pub w_length: f64,
    pub w_density: f64,
    pub w_stipe: f64,
    /// Fraction of the price lost at zero health.
    pub disease_penalty: f64,
}

impl Default for PriceWeights {
    fn default() -> Self {
        Self {
            w_width: 0.25,
            w_length: 0.25,
            w_density: 0.25,
            w_stipe: 0.25,
            disease_penalty: 0.5,
        }
    }
}

impl PriceWeights {
    pub fn validate(&self) -> Result<()> {
        let w = [self.w_width, self.w_length, self.w_density, self.w_stipe];
        if w.iter().any(|v| !(*v >= 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "price weights must be non-negative and sum to 1, got {w:?}"
            )));
        }
        if !(0.0..=1.0).contains(&self.disease_penalty) {
            return Err(Error::Config("disease_penalty must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwarmConfig {
    pub capacity: usize,
    /// Maturity gained per second at `ei = 1`.
    pub growth_rate: f64,
    /// Plants spawned per second at `ei = 1`.
    pub spawn_rate: f64,
    /// Mature plants present when the world starts.
    pub initial_plants: usize,
    /// Juveniles planted when a new cycle starts after extinction.
    pub reseed_juveniles: usize,
    /// Price of a perfect, healthy plant in tokens.
    pub full_price: f64,
    pub price: PriceWeights,
    /// Share of irradiation (vs nutrients) in stipe length.
    pub stipe_irradiation_weight: f64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            capacity: 60,
            growth_rate: 0.02,
            spawn_rate: 0.05,
            initial_plants: 12,
            reseed_juveniles: 3,
            full_price: 2.0,
            price: PriceWeights::default(),
            stipe_irradiation_weight: crate::genmodel::DEFAULT_STIPE_IRRADIATION_WEIGHT,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.capacity == 0 {
            return Err(Error::Config("swarm capacity must be positive".into()));
        }
        if !(self.growth_rate > 0.0 && self.growth_rate.is_finite()) {
            return Err(Error::Config("growth_rate must be positive".into()));
        }
        if !(self.spawn_rate >= 0.0 && self.spawn_rate.is_finite()) {
            return Err(Error::Config("spawn_rate must be non-negative".into()));
        }
        if self.initial_plants > self.capacity || self.reseed_juveniles > self.capacity {
            return Err(Error::Config(
                "initial_plants and reseed_juveniles cannot exceed capacity".into(),
            ));
        }
        if !(self.full_price >= 0.0 && self.full_price.is_finite()) {
            return Err(Error::Config("full_price must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.stipe_irradiation_weight) {
            return Err(Error::Config(
                "stipe_irradiation_weight must lie in [0, 1]".into(),
            ));
        }
        self.price.validate()
    }
}

/// What a newly spawned plant needs from the outside world.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sprout {
    pub shape: ShapeParams,
    pub disease_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmState {
    pub plants: Vec<SeaweedPlant>,
    pub capacity: usize,
    pub spawn_accumulator: f64,
    pub extinct: bool,
    pub next_id: u64,
}

impl SwarmState {
    pub fn new(capacity: usize) -> Self {
        Self {
            plants: Vec::new(),
            capacity,
            spawn_accumulator: 0.0,
            extinct: false,
            next_id: 0,
        }
    }

    /// Adds a plant unless the swarm is full. Returns its id.
    pub fn plant(&mut self, sprout: Sprout, maturity: f64, health: f64, tick: u64) -> Option<u64> {
        if self.plants.len() >= self.capacity {
            return None;
        }
        let id = self.next_id;
        self.next_id += 1;
        self.plants.push(SeaweedPlant {
            id,
            shape: sprout.shape.clamped(),
            maturity: maturity.clamp(0.0, 1.0),
            health: health.clamp(0.0, 1.0),
            spawn_tick: tick,
            disease_seed: sprout.disease_seed,
        });
        Some(id)
    }

    /// Grows every plant by `g0·max(ei, 0)·dt` and spawns new ones at
    /// `r0·max(ei, 0)` plants per second. Nothing happens when `ei ≤ 0`.
    ///
    /// `sprout` is called with the new plant's id and supplies its shape
    /// and disease seed.
    pub fn growth_step<F>(
        &mut self,
        ei: f64,
        dt: f64,
        cfg: &SwarmConfig,
        tick: u64,
        health: f64,
        mut sprout: F,
    ) where
        F: FnMut(u64) -> Sprout,
    {
        if !(ei > 0.0) || self.extinct {
            return;
        }
        let growth = cfg.growth_rate * ei * dt;
        for p in &mut self.plants {
            p.maturity = (p.maturity + growth).min(1.0);
        }
        self.spawn_accumulator += cfg.spawn_rate * ei * dt;
        while self.spawn_accumulator >= 1.0 {
            self.spawn_accumulator -= 1.0;
            if self.plants.len() < self.capacity {
                let s = sprout(self.next_id);
                self.plant(s, 0.0, health, tick);
            }
        }
    }

    /// Harvests one plant for one seaweed-target token.
    ///
    /// Takes the mature plant with the earliest spawn tick (lowest id on
    /// ties). In the crisis stage growth is frozen, so when no mature plant
    /// is left the oldest remaining plant is taken instead. If the swarm is
    /// empty after a crisis-stage harvest it is marked extinct.
    pub fn harvest(&mut self, stage: Stage) -> Option<SeaweedPlant> {
        let oldest = |only_mature: bool| {
            self.plants
                .iter()
                .enumerate()
                .filter(|(_, p)| !only_mature || p.is_mature())
                .min_by_key(|(_, p)| (p.spawn_tick, p.id))
                .map(|(i, _)| i)
        };
        let pick = oldest(true).or_else(|| {
            if stage == Stage::Crisis {
                oldest(false)
            } else {
                None
            }
        });
        let taken = pick.map(|i| self.plants.remove(i));
        if stage == Stage::Crisis && self.plants.is_empty() {
            self.extinct = true;
            self.spawn_accumulator = 0.0;
        }
        taken
    }

    pub fn set_health(&mut self, health: f64) {
        for p in &mut self.plants {
            p.health = health;
        }
    }
}

/// `P_max · Σ wᵢ·shapeᵢ · (1 − k·(1 − health))`.
pub fn price_of(p: &SeaweedPlant, w: &PriceWeights, full_price: f64) -> f64 {
    let s = &p.shape;
    let base = w.w_width * s.blade_width
        + w.w_length * s.blade_length
        + w.w_density * s.blade_density
        + w.w_stipe * s.stipe_length;
    full_price * base * (1.0 - w.disease_penalty * (1.0 - p.health))
}

const STIPE_SCALE: f64 = 1.0;
const STIPE_THICKNESS: f64 = 0.03;
const FROND_LENGTH: f64 = 1.0;
const FROND_WIDTH: f64 = 0.3;
const FAN_DEGREES: f64 = 120.0;
const FROND_STEPS: usize = 8;

pub fn frond_count(blade_density: f64) -> usize {
    (3.0 + 9.0 * blade_density.clamp(0.0, 1.0)).round() as usize
}

/// Stipe as a vertical segment from the origin, fronds as leaf outlines
/// fanned from the stipe tip. Fan jitter is seeded by the plant id.
pub fn swarm_geometry(p: &SeaweedPlant) -> GeometryDescriptor {
    let shape = &p.shape;
    let tip = [0.0, STIPE_SCALE * shape.stipe_length];
    let n = frond_count(shape.blade_density);
    let length = FROND_LENGTH * shape.blade_length * p.maturity;
    let half_width = 0.5 * FROND_WIDTH * shape.blade_width;
    let slot = FAN_DEGREES / n as f64;
    let mut rng = SplitMix64::new(p.id ^ 0x5EA_4EED);

    let outlines = (0..n)
        .map(|k| {
            let jitter = (rng.next_f64() - 0.5) * 0.5 * slot;
            let angle = -0.5 * FAN_DEGREES + slot * (k as f64 + 0.5) + jitter;
            let axis = direction(angle);
            let normal = [axis[1], -axis[0]];
            let side = |t: f64, sign: f64| {
                let w = sign * half_width * (std::f64::consts::PI * t).sin();
                offset(offset(tip, axis, length * t), normal, w)
            };
            let mut points: Vec<_> = (0..=FROND_STEPS)
                .map(|i| side(i as f64 / FROND_STEPS as f64, 1.0))
                .collect();
            points.extend(
                (1..FROND_STEPS)
                    .rev()
                    .map(|i| side(i as f64 / FROND_STEPS as f64, -1.0)),
            );
            Outline { points }
        })
        .collect();

    GeometryDescriptor {
        segments: vec![Segment {
            from: [0.0, 0.0],
            to: tip,
            thickness: STIPE_THICKNESS,
        }],
        circles: Vec::new(),
        outlines,
    }
}
