//! Oomycete infection, fungal cure, respawn, and the disease-patch mask.
//!
//! A single oomycete infects the whole swarm at a time. Curing needs a number
//! of fungi that grows as EI falls, and the next oomycete arrives sooner the
//! lower EI is. Both couplings are clamped linear maps over `[-a2, a1]`.

use serde::{Deserialize, Serialize};

use crate::ecology::EiRange;
use crate::error::{Error, Result};
use crate::noise::GradientNoise;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathologyConfig {
    /// Fungi needed at the best EI.
    pub r_min: u32,
    /// Fungi needed at the worst EI.
    pub r_max: u32,
    /// Respawn delay (s) at the worst EI.
    pub t_min: f64,
    /// Respawn delay (s) at the best EI.
    pub t_max: f64,
    /// Swarm health right after infection.
    pub infected_health: f64,
    pub mask: MaskConfig,
}

impl Default for PathologyConfig {
    fn default() -> Self {
        Self {
            r_min: 2,
            r_max: 10,
            t_min: 15.0,
            t_max: 90.0,
            infected_health: 0.3,
            mask: MaskConfig::default(),
        }
    }
}

impl PathologyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.r_min && self.r_min <= self.r_max) {
            return Err(Error::Config(format!(
                "required fungi bounds must satisfy 1 <= r_min <= r_max, got {} and {}",
                self.r_min, self.r_max
            )));
        }
        if !(0.0 <= self.t_min && self.t_min <= self.t_max && self.t_max.is_finite()) {
            return Err(Error::Config(format!(
                "respawn delays must satisfy 0 <= t_min <= t_max, got {} and {}",
                self.t_min, self.t_max
            )));
        }
        if !(0.0..=1.0).contains(&self.infected_health) {
            return Err(Error::Config("infected_health must lie in [0, 1]".into()));
        }
        self.mask.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaskConfig {
    pub e_min: f64,
    pub e_max: f64,
    pub scale_min: f64,
    pub scale_max: f64,
}

impl Default for MaskConfig {
    fn default() -> Self {
        Self {
            e_min: 0.35,
            e_max: 0.95,
            scale_min: 2.0,
            scale_max: 8.0,
        }
    }
}

impl MaskConfig {
    fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.e_min)
            && (0.0..=1.0).contains(&self.e_max)
            && self.e_min <= self.e_max
            && self.scale_min > 0.0
            && self.scale_min <= self.scale_max
            && self.scale_max.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid disease mask config {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathologyState {
    pub oomycete_present: bool,
    pub fungi_count: u32,
    pub required_fungi: u32,
    /// Seconds until the next oomycete while none is present.
    pub respawn_timer: f64,
    /// 1 means fully cured.
    pub swarm_health: f64,
}

impl PathologyState {
    /// Healthy swarm with the first oomycete scheduled for `ei`.
    pub fn new(ei: f64, range: EiRange, cfg: &PathologyConfig) -> Self {
        Self {
            oomycete_present: false,
            fungi_count: 0,
            required_fungi: required_fungi(ei, range, cfg),
            respawn_timer: respawn_delay(ei, range, cfg),
            swarm_health: 1.0,
        }
    }

    /// One fungi-target token. Returns `true` if this fungus killed the oomycete.
    pub fn cultivate_fungus(&mut self, ei: f64, range: EiRange, cfg: &PathologyConfig) -> bool {
        if !self.oomycete_present {
            return false;
        }
        self.required_fungi = required_fungi(ei, range, cfg);
        self.fungi_count += 1;
        if self.fungi_count >= self.required_fungi {
            self.oomycete_present = false;
            self.swarm_health = 1.0;
            self.fungi_count = 0;
            self.respawn_timer = respawn_delay(ei, range, cfg);
            true
        } else {
            self.swarm_health = (self.fungi_count as f64 / self.required_fungi as f64).min(1.0);
            false
        }
    }

    /// Advances the respawn countdown. Returns `true` if an oomycete appeared.
    pub fn tick(&mut self, ei: f64, dt: f64, range: EiRange, cfg: &PathologyConfig) -> bool {
        if self.oomycete_present {
            return false;
        }
        self.respawn_timer -= dt;
        // repeated subtraction of dt leaves rounding residue near zero
        if self.respawn_timer > 1e-9 {
            return false;
        }
        self.oomycete_present = true;
        self.respawn_timer = 0.0;
        self.required_fungi = required_fungi(ei, range, cfg);
        self.swarm_health = cfg.infected_health;
        self.fungi_count = 0;
        true
    }
}

/// Fungi needed to kill an oomycete: `r_min` at `ei = a1`, `r_max` at
/// `ei = -a2`, linear in between, rounded up.
pub fn required_fungi(ei: f64, range: EiRange, cfg: &PathologyConfig) -> u32 {
    let badness = 1.0 - range.fraction(ei);
    let exact = cfg.r_min as f64 + (cfg.r_max - cfg.r_min) as f64 * badness;
    // absorb rounding noise before taking the ceiling
    let n = (exact - 1e-9).ceil() as u32;
    n.clamp(cfg.r_min, cfg.r_max)
}

/// Seconds until the next oomycete: `t_min` at `ei = -a2`, `t_max` at `ei = a1`.
pub fn respawn_delay(ei: f64, range: EiRange, cfg: &PathologyConfig) -> f64 {
    cfg.t_min + (cfg.t_max - cfg.t_min) * range.fraction(ei)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiseaseMaskParams {
    /// Step threshold; normalized noise above it becomes a glowing patch.
    pub edge: f64,
    /// Noise cells per unit length of blade.
    pub noise_scale: f64,
    pub seed: u64,
}

impl DiseaseMaskParams {
    pub fn validate(&self) -> Result<()> {
        if (0.0..=1.0).contains(&self.edge)
            && self.noise_scale > 0.0
            && self.noise_scale.is_finite()
        {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "invalid disease mask params {self:?}"
            )))
        }
    }
}

/// Healthier seaweed gets a higher edge (fewer patches) and a higher noise
/// frequency (smaller patches).
pub fn mask_params_from_health(health: f64, seed: u64, cfg: &MaskConfig) -> DiseaseMaskParams {
    let h = if health.is_nan() {
        0.0
    } else {
        health.clamp(0.0, 1.0)
    };
    DiseaseMaskParams {
        edge: cfg.e_min + (cfg.e_max - cfg.e_min) * h,
        noise_scale: cfg.scale_min + (cfg.scale_max - cfg.scale_min) * h,
        seed,
    }
}

pub const MIN_MASK_RESOLUTION: usize = 16;

/// Binary mask: `true` where normalized noise exceeds `edge`.
pub fn disease_mask(params: &DiseaseMaskParams, resolution: usize) -> Result<Vec<bool>> {
    params.validate()?;
    if resolution < MIN_MASK_RESOLUTION {
        return Err(Error::Input(format!(
            "mask resolution must be at least {MIN_MASK_RESOLUTION}, got {resolution}"
        )));
    }
    Ok(GradientNoise::new(params.seed)
        .grid(params.noise_scale, resolution)
        .into_iter()
        .map(|v| v > params.edge)
        .collect())
}

/// Fraction of mask cells that are glowing patches.
pub fn disease_mask_fraction(params: &DiseaseMaskParams, resolution: usize) -> Result<f64> {
    let mask = disease_mask(params, resolution)?;
    let lit = mask.iter().filter(|b| **b).count();
    Ok(lit as f64 / mask.len() as f64)
}
