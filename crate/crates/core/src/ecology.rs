//! Ecological index (EI): a periodic curve driven by seaweed-target token
//! insertions, its three stages, and the five natural factors derived from it.
//!
//! One cycle of `cycle` insertions is split into
//!
//! * Prosperity `c ∈ [0, c1]`: quarter sine rising `0 → a1`,
//! * Decline `c ∈ (c1, c2]`: quarter sine falling `a1 → 0`,
//! * Crisis `c ∈ (c2, cycle)`: negative half sine of depth `a2` returning to 0.
//!
//! The curve is continuous at both joints and at the cycle wrap.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Prosperity,
    Decline,
    Crisis,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Prosperity => "prosperity",
            Stage::Decline => "decline",
            Stage::Crisis => "crisis",
        }
    }
}

/// The five natural factors, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    WaterTemperature,
    Salinity,
    FlowVelocity,
    Irradiation,
    NutrientConcentration,
}

impl Factor {
    pub const ALL: [Factor; 5] = [
        Factor::WaterTemperature,
        Factor::Salinity,
        Factor::FlowVelocity,
        Factor::Irradiation,
        Factor::NutrientConcentration,
    ];

    /// Label used in file names and JSON.
    pub fn label(self) -> &'static str {
        match self {
            Factor::WaterTemperature => "water_temperature",
            Factor::Salinity => "salinity",
            Factor::FlowVelocity => "flow_velocity",
            Factor::Irradiation => "irradiation",
            Factor::NutrientConcentration => "nutrient_concentration",
        }
    }

    pub fn from_label(label: &str) -> Option<Factor> {
        Factor::ALL.into_iter().find(|f| f.label() == label)
    }
}

impl std::fmt::Display for Factor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Physical range of one factor: `min ≤ baseline ≤ max`, `min < max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorRange {
    pub min: f64,
    pub max: f64,
    pub baseline: f64,
}

impl FactorRange {
    pub const fn new(min: f64, max: f64, baseline: f64) -> Self {
        Self { min, max, baseline }
    }

    fn validate(&self, factor: Factor) -> Result<()> {
        let ok = self.min.is_finite()
            && self.max.is_finite()
            && self.baseline.is_finite()
            && self.min < self.max
            && self.min <= self.baseline
            && self.baseline <= self.max;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "factor range for {factor} must satisfy min < max and min <= baseline <= max, got {self:?}"
            )))
        }
    }

    /// Piecewise-linear map of `u ∈ [-1, 1]` onto `[min, baseline, max]`.
    fn at(&self, u: f64) -> f64 {
        let u = u.clamp(-1.0, 1.0);
        let span = if u >= 0.0 {
            self.max - self.baseline
        } else {
            self.baseline - self.min
        };
        (self.baseline + span * u).clamp(self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorRanges {
    pub water_temperature: FactorRange,
    pub salinity: FactorRange,
    pub flow_velocity: FactorRange,
    pub irradiation: FactorRange,
    pub nutrient_concentration: FactorRange,
}

impl Default for FactorRanges {
    fn default() -> Self {
        Self {
            water_temperature: FactorRange::new(4.0, 16.0, 10.0),
            salinity: FactorRange::new(20.0, 35.0, 30.0),
            flow_velocity: FactorRange::new(0.05, 0.5, 0.2),
            irradiation: FactorRange::new(20.0, 180.0, 80.0),
            nutrient_concentration: FactorRange::new(2.0, 25.0, 10.0),
        }
    }
}

impl FactorRanges {
    pub fn get(&self, factor: Factor) -> &FactorRange {
        match factor {
            Factor::WaterTemperature => &self.water_temperature,
            Factor::Salinity => &self.salinity,
            Factor::FlowVelocity => &self.flow_velocity,
            Factor::Irradiation => &self.irradiation,
            Factor::NutrientConcentration => &self.nutrient_concentration,
        }
    }
}

/// Water temperature (°C), salinity (PSU), flow velocity (m/s),
/// irradiation (µmol photons m⁻² s⁻¹) and nutrient concentration (µmol/L).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalFactors {
    pub water_temperature: f64,
    pub salinity: f64,
    pub flow_velocity: f64,
    pub irradiation: f64,
    pub nutrient_concentration: f64,
}

impl NaturalFactors {
    pub fn get(&self, factor: Factor) -> f64 {
        match factor {
            Factor::WaterTemperature => self.water_temperature,
            Factor::Salinity => self.salinity,
            Factor::FlowVelocity => self.flow_velocity,
            Factor::Irradiation => self.irradiation,
            Factor::NutrientConcentration => self.nutrient_concentration,
        }
    }

    fn from_fn(mut f: impl FnMut(Factor) -> f64) -> Self {
        Self {
            water_temperature: f(Factor::WaterTemperature),
            salinity: f(Factor::Salinity),
            flow_velocity: f(Factor::FlowVelocity),
            irradiation: f(Factor::Irradiation),
            nutrient_concentration: f(Factor::NutrientConcentration),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EcoConfig {
    /// Prosperity peak.
    pub a1: f64,
    /// Crisis trough depth.
    pub a2: f64,
    /// Insertion count ending prosperity.
    pub c1: u32,
    /// Insertion count ending decline.
    pub c2: u32,
    /// Insertions per full cycle.
    pub cycle: u32,
    pub factor_ranges: FactorRanges,
}

impl Default for EcoConfig {
    fn default() -> Self {
        Self {
            a1: 1.0,
            a2: 0.5,
            c1: 40,
            c2: 80,
            cycle: 120,
            factor_ranges: FactorRanges::default(),
        }
    }
}

impl EcoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0 < self.c1 && self.c1 < self.c2 && self.c2 < self.cycle) {
            return Err(Error::Config(format!(
                "stage boundaries must satisfy 0 < c1 < c2 < cycle, got c1={} c2={} cycle={}",
                self.c1, self.c2, self.cycle
            )));
        }
        if !(self.a1 > 0.0 && self.a1.is_finite() && self.a2 > 0.0 && self.a2.is_finite()) {
            return Err(Error::Config(format!(
                "EI amplitudes must be positive, got a1={} a2={}",
                self.a1, self.a2
            )));
        }
        for factor in Factor::ALL {
            self.factor_ranges.get(factor).validate(factor)?;
        }
        Ok(())
    }

    /// Closed range of EI values the curve can take: `[-a2, a1]`.
    pub fn ei_range(&self) -> EiRange {
        EiRange {
            low: -self.a2,
            high: self.a1,
        }
    }
}

/// The attainable EI interval, used by the EI-coupled linear maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EiRange {
    pub low: f64,
    pub high: f64,
}

impl EiRange {
    /// Position of `ei` in the range, 0 at `low` and 1 at `high`, clamped.
    pub fn fraction(&self, ei: f64) -> f64 {
        ((ei - self.low) / (self.high - self.low)).clamp(0.0, 1.0)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.low + self.high)
    }
}

fn check_domain(c: u32, cfg: &EcoConfig) -> Result<()> {
    if c < cfg.cycle {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "insertion count {c} outside [0, {})",
            cfg.cycle
        )))
    }
}

/// Continuous extension of the EI curve for real `c ∈ [0, cycle]`.
///
/// Integer evaluation goes through [`ei_from_insertions`]; this form exists
/// for continuity checks and smooth plotting.
pub fn ei_at(c: f64, cfg: &EcoConfig) -> f64 {
    let (c1, c2, cycle) = (cfg.c1 as f64, cfg.c2 as f64, cfg.cycle as f64);
    if c <= c1 {
        cfg.a1 * (FRAC_PI_2 * c / c1).sin()
    } else if c <= c2 {
        // sin of the remaining distance, so the value at c2 is exactly 0
        cfg.a1 * (FRAC_PI_2 * (c2 - c) / (c2 - c1)).sin()
    } else {
        -cfg.a2 * (PI * (c - c2) / (cycle - c2)).sin()
    }
}

/// EI after `c` seaweed-target insertions into the current cycle.
pub fn ei_from_insertions(c: u32, cfg: &EcoConfig) -> Result<f64> {
    check_domain(c, cfg)?;
    Ok(ei_at(c as f64, cfg))
}

pub fn stage_of(c: u32, cfg: &EcoConfig) -> Result<Stage> {
    check_domain(c, cfg)?;
    Ok(if c <= cfg.c1 {
        Stage::Prosperity
    } else if c <= cfg.c2 {
        Stage::Decline
    } else {
        Stage::Crisis
    })
}

/// Maps EI onto the five factors: `u = ei / a1` clamped to `[-1, 1]`, then
/// each factor moves from its baseline toward max (u > 0) or min (u < 0).
pub fn factors_from_ei(ei: f64, cfg: &EcoConfig) -> NaturalFactors {
    let u = if ei.is_nan() { 0.0 } else { ei / cfg.a1 };
    NaturalFactors::from_fn(|f| cfg.factor_ranges.get(f).at(u))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcoState {
    pub insertions_in_cycle: u32,
    pub total_insertions: u64,
    pub ei: f64,
    pub stage: Stage,
    pub factors: NaturalFactors,
}

impl EcoState {
    pub fn new(cfg: &EcoConfig) -> Self {
        Self::at_insertion(0, 0, cfg)
    }

    fn at_insertion(c: u32, total: u64, cfg: &EcoConfig) -> Self {
        let ei = ei_at(c as f64, cfg);
        Self {
            insertions_in_cycle: c,
            total_insertions: total,
            ei,
            stage: stage_of(c, cfg).expect("insertion count kept below cycle"),
            factors: factors_from_ei(ei, cfg),
        }
    }

    /// Registers one seaweed-target insertion. Returns `true` when the cycle wrapped.
    pub fn advance(&mut self, cfg: &EcoConfig) -> bool {
        let next = (self.insertions_in_cycle + 1) % cfg.cycle;
        *self = Self::at_insertion(next, self.total_insertions + 1, cfg);
        next == 0
    }

    pub fn check_invariants(&self, cfg: &EcoConfig) -> Result<()> {
        let ei = ei_from_insertions(self.insertions_in_cycle, cfg)?;
        let stage = stage_of(self.insertions_in_cycle, cfg)?;
        if ei.to_bits() != self.ei.to_bits() || stage != self.stage {
            return Err(Error::Logic(format!(
                "eco state out of sync at c={}: ei {} vs {}, stage {:?} vs {:?}",
                self.insertions_in_cycle, self.ei, ei, self.stage, stage
            )));
        }
        Ok(())
    }
}
