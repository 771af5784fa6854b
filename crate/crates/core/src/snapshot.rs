//! Versioned, read-only view of the world for clients.
//!
//! Schema version 1. Every field name below is part of the wire format.

use serde::{Deserialize, Serialize};

use crate::ecology::{NaturalFactors, Stage};
use crate::engine::{Engine, Target};
use crate::fungigen::{fungus_geometry, SpeciesKind};
use crate::genmodel::ShapeParams;
use crate::geometry::GeometryDescriptor;
use crate::pathology::{mask_params_from_health, DiseaseMaskParams};
use crate::swarm::{price_of, swarm_geometry};

pub const SNAPSHOT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSummary {
    pub id: u64,
    pub shape: ShapeParams,
    pub maturity: f64,
    pub health: f64,
    pub price: f64,
    pub mask: DiseaseMaskParams,
    pub geometry: GeometryDescriptor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FungusSummary {
    pub species: SpeciesKind,
    pub seed: u64,
    pub geometry: GeometryDescriptor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerCounters {
    pub inserted_seaweed: u64,
    pub inserted_fungi: u64,
    pub dispensed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OomyceteStatus {
    pub present: bool,
    pub fungi_count: u32,
    pub required_fungi: u32,
    pub respawn_timer: f64,
    pub swarm_health: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub schema_version: u32,
    pub tick: u64,
    pub sim_time: f64,
    pub ei: f64,
    pub stage: Stage,
    pub insertions_in_cycle: u32,
    pub cycle_length: u32,
    pub factors: NaturalFactors,
    /// Current maturity gain per second.
    pub growth_rate: f64,
    pub plant_count: usize,
    pub extinct: bool,
    pub plants: Vec<PlantSummary>,
    pub fungi_gallery: Vec<FungusSummary>,
    pub ledger: LedgerCounters,
    pub current_target: Target,
    pub oomycete: OomyceteStatus,
    /// Token value waiting for the next settlement, carry included.
    pub unsettled_profit: f64,
    pub settlement_countdown: f64,
    pub settlement_period: f64,
}

impl Snapshot {
    pub fn capture(engine: &Engine) -> Self {
        let cfg = engine.config();
        let st = engine.state();
        let plants = st
            .swarm
            .plants
            .iter()
            .map(|p| PlantSummary {
                id: p.id,
                shape: p.shape,
                maturity: p.maturity,
                health: p.health,
                price: price_of(p, &cfg.swarm.price, cfg.swarm.full_price),
                mask: mask_params_from_health(p.health, p.disease_seed, &cfg.pathology.mask),
                geometry: swarm_geometry(p),
            })
            .collect();
        let fungi_gallery = st
            .fungi_gallery
            .iter()
            .map(|t| FungusSummary {
                species: t.species,
                seed: t.seed,
                geometry: fungus_geometry(t),
            })
            .collect();
        Self {
            schema_version: SNAPSHOT_SCHEMA_VERSION,
            tick: st.tick,
            sim_time: st.sim_time,
            ei: st.eco.ei,
            stage: st.eco.stage,
            insertions_in_cycle: st.eco.insertions_in_cycle,
            cycle_length: cfg.ecology.cycle,
            factors: st.eco.factors,
            growth_rate: cfg.swarm.growth_rate * st.eco.ei.max(0.0),
            plant_count: st.swarm.plants.len(),
            extinct: st.swarm.extinct,
            plants,
            fungi_gallery,
            ledger: LedgerCounters {
                inserted_seaweed: st.ledger.inserted_seaweed,
                inserted_fungi: st.ledger.inserted_fungi,
                dispensed: st.ledger.dispensed,
            },
            current_target: st.current_target,
            oomycete: OomyceteStatus {
                present: st.pathology.oomycete_present,
                fungi_count: st.pathology.fungi_count,
                required_fungi: st.pathology.required_fungi,
                respawn_timer: st.pathology.respawn_timer,
                swarm_health: st.pathology.swarm_health,
            },
            unsettled_profit: st.ledger.unsettled_total(),
            settlement_countdown: engine.settlement_countdown(),
            settlement_period: cfg.settlement.period,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }
}
