//! Rule-based fungus conidiophores: stipe → metulae → phialides → conidia.
//!
//! Every count, length, thickness and angle spread is drawn uniformly from a
//! per-species interval with a ChaCha8 generator seeded by the tree seed.
//! Draw order, level by level:
//!
//! 1. stipe: length, thickness, metula count, metula spread;
//! 2. each metula in index order: length, thickness, phialide count, phialide spread;
//! 3. each phialide (metula-major order): length, thickness, conidia count;
//! 4. each conidium (phialide-major order): radius.
//!
//! Children are fanned symmetrically about the parent axis across the drawn
//! spread; conidia are chained outward from the phialide tip.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{direction, offset, Circle, GeometryDescriptor, Point, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeciesKind {
    PenicilliumLike,
    AspergillusLike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: u32,
    pub max: u32,
}

impl CountRange {
    pub const fn new(min: u32, max: u32) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: u32) -> bool {
        (self.min..=self.max).contains(&v)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u32 {
        rng.random_range(self.min..=self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.min..=self.max).contains(&v)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.random_range(self.min..=self.max)
    }
}

/// Interval rules for one species. Angles are in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FungusSpecies {
    pub kind: SpeciesKind,
    pub metula_count: CountRange,
    pub phialide_count: CountRange,
    pub conidia_count: CountRange,
    pub stipe_length: Interval,
    pub metula_length: Interval,
    pub phialide_length: Interval,
    pub branch_angle_spread: Interval,
    pub stipe_thickness: Interval,
    pub metula_thickness: Interval,
    pub phialide_thickness: Interval,
    pub conidium_radius: Interval,
}

impl FungusSpecies {
    pub fn penicillium_like() -> Self {
        Self {
            kind: SpeciesKind::PenicilliumLike,
            metula_count: CountRange::new(2, 5),
            phialide_count: CountRange::new(2, 5),
            conidia_count: CountRange::new(3, 8),
            stipe_length: Interval::new(0.6, 1.0),
            metula_length: Interval::new(0.2, 0.4),
            phialide_length: Interval::new(0.1, 0.2),
            branch_angle_spread: Interval::new(20.0, 70.0),
            stipe_thickness: Interval::new(0.04, 0.07),
            metula_thickness: Interval::new(0.02, 0.04),
            phialide_thickness: Interval::new(0.01, 0.02),
            conidium_radius: Interval::new(0.012, 0.02),
        }
    }

    /// Denser conidial head on a wider fan.
    pub fn aspergillus_like() -> Self {
        Self {
            kind: SpeciesKind::AspergillusLike,
            conidia_count: CountRange::new(6, 12),
            branch_angle_spread: Interval::new(40.0, 70.0),
            conidium_radius: Interval::new(0.01, 0.016),
            ..Self::penicillium_like()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [self.metula_count, self.phialide_count, self.conidia_count];
        if counts.iter().any(|c| c.min == 0 || c.min > c.max) {
            return Err(Error::Config(format!(
                "{:?}: count ranges need 1 <= min <= max",
                self.kind
            )));
        }
        let intervals = [
            self.stipe_length,
            self.metula_length,
            self.phialide_length,
            self.branch_angle_spread,
            self.stipe_thickness,
            self.metula_thickness,
            self.phialide_thickness,
            self.conidium_radius,
        ];
        if intervals
            .iter()
            .any(|i| !(i.min.is_finite() && i.max.is_finite() && i.min >= 0.0 && i.min <= i.max))
        {
            return Err(Error::Config(format!(
                "{:?}: intervals need 0 <= min <= max",
                self.kind
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FungiConfig {
    pub penicillium: FungusSpecies,
    pub aspergillus: FungusSpecies,
    /// Most recent trees kept in the gallery.
    pub gallery_limit: usize,
}

impl Default for FungiConfig {
    fn default() -> Self {
        Self {
            penicillium: FungusSpecies::penicillium_like(),
            aspergillus: FungusSpecies::aspergillus_like(),
            gallery_limit: 32,
        }
    }
}

impl FungiConfig {
    pub fn validate(&self) -> Result<()> {
        self.penicillium.validate()?;
        self.aspergillus.validate()?;
        if self.penicillium.kind != SpeciesKind::PenicilliumLike
            || self.aspergillus.kind != SpeciesKind::AspergillusLike
        {
            return Err(Error::Config(
                "species tables are assigned to the wrong kind".into(),
            ));
        }
        if self.gallery_limit == 0 {
            return Err(Error::Config("gallery_limit must be positive".into()));
        }
        Ok(())
    }

    pub fn species(&self, kind: SpeciesKind) -> &FungusSpecies {
        match kind {
            SpeciesKind::PenicilliumLike => &self.penicillium,
            SpeciesKind::AspergillusLike => &self.aspergillus,
        }
    }

    /// Species alternate by cultivation index, Penicillium-like first.
    pub fn species_for_cultivation(&self, index: u64) -> &FungusSpecies {
        if index.is_multiple_of(2) {
            &self.penicillium
        } else {
            &self.aspergillus
        }
    }
}

/// A straight branch. `angle` is relative to the parent axis, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub length: f64,
    pub thickness: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conidium {
    pub radius: f64,
    /// Distance of the centre from the phialide tip along its axis.
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phialide {
    pub branch: Branch,
    pub conidia: Vec<Conidium>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metula {
    pub branch: Branch,
    /// Fan width drawn for this metula's phialides.
    pub spread: f64,
    pub phialides: Vec<Phialide>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FungusTree {
    pub species: SpeciesKind,
    pub seed: u64,
    pub stipe: Branch,
    /// Fan width drawn for the metulae.
    pub spread: f64,
    pub metulae: Vec<Metula>,
}

fn fan(n: usize, spread: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| {
        if n == 1 {
            0.0
        } else {
            -0.5 * spread + spread * k as f64 / (n - 1) as f64
        }
    })
}

pub fn generate_fungus(species: &FungusSpecies, seed: u64) -> FungusTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let stipe_length = species.stipe_length.sample(&mut rng);
    let stipe_thickness = species.stipe_thickness.sample(&mut rng);
    let metula_count = species.metula_count.sample(&mut rng) as usize;
    let metula_spread = species.branch_angle_spread.sample(&mut rng);

    let mut metulae: Vec<Metula> = fan(metula_count, metula_spread)
        .map(|angle| {
            let length = species.metula_length.sample(&mut rng);
            let thickness = species.metula_thickness.sample(&mut rng);
            let count = species.phialide_count.sample(&mut rng) as usize;
            let spread = species.branch_angle_spread.sample(&mut rng);
            Metula {
                branch: Branch {
                    length,
                    thickness,
                    angle,
                },
                spread,
                phialides: Vec::with_capacity(count),
            }
            .with_slots(count)
        })
        .collect();

    let mut conidia_counts = Vec::new();
    for metula in &mut metulae {
        let angles: Vec<f64> = fan(metula.phialides.len(), metula.spread).collect();
        for (phialide, angle) in metula.phialides.iter_mut().zip(angles) {
            phialide.branch = Branch {
                length: species.phialide_length.sample(&mut rng),
                thickness: species.phialide_thickness.sample(&mut rng),
                angle,
            };
            conidia_counts.push(species.conidia_count.sample(&mut rng));
        }
    }

    let mut counts = conidia_counts.into_iter();
    for phialide in metulae.iter_mut().flat_map(|m| m.phialides.iter_mut()) {
        let n = counts.next().expect("one count per phialide");
        let mut reach = 0.0;
        phialide.conidia = (0..n)
            .map(|_| {
                let radius = species.conidium_radius.sample(&mut rng);
                let c = Conidium {
                    radius,
                    offset: reach + radius,
                };
                reach += 2.0 * radius;
                c
            })
            .collect();
    }

    FungusTree {
        species: species.kind,
        seed,
        stipe: Branch {
            length: stipe_length,
            thickness: stipe_thickness,
            angle: 0.0,
        },
        spread: metula_spread,
        metulae,
    }
}

impl Metula {
    fn with_slots(mut self, n: usize) -> Self {
        let empty = Branch {
            length: 0.0,
            thickness: 0.0,
            angle: 0.0,
        };
        self.phialides = (0..n)
            .map(|_| Phialide {
                branch: empty,
                conidia: Vec::new(),
            })
            .collect();
        self
    }
}

impl FungusTree {
    /// Checks level structure and that every drawn value lies in its interval.
    pub fn validate(&self, species: &FungusSpecies) -> Result<()> {
        let fail = |what: &str| Err(Error::Logic(format!("fungus tree {}: {what}", self.seed)));
        if self.species != species.kind {
            return fail("species mismatch");
        }
        if !species.stipe_length.contains(self.stipe.length)
            || !species.stipe_thickness.contains(self.stipe.thickness)
        {
            return fail("stipe outside interval");
        }
        if !species.metula_count.contains(self.metulae.len() as u32)
            || !species.branch_angle_spread.contains(self.spread)
        {
            return fail("metula count or spread outside interval");
        }
        for m in &self.metulae {
            if !species.metula_length.contains(m.branch.length)
                || !species.metula_thickness.contains(m.branch.thickness)
                || !species.phialide_count.contains(m.phialides.len() as u32)
                || !species.branch_angle_spread.contains(m.spread)
                || m.branch.angle.abs() > 0.5 * self.spread + 1e-9
            {
                return fail("metula outside interval");
            }
            for p in &m.phialides {
                if !species.phialide_length.contains(p.branch.length)
                    || !species.phialide_thickness.contains(p.branch.thickness)
                    || !species.conidia_count.contains(p.conidia.len() as u32)
                    || p.branch.angle.abs() > 0.5 * m.spread + 1e-9
                {
                    return fail("phialide outside interval");
                }
                if p.conidia
                    .iter()
                    .any(|c| !species.conidium_radius.contains(c.radius))
                {
                    return fail("conidium outside interval");
                }
            }
        }
        Ok(())
    }

    pub fn segment_count(&self) -> usize {
        1 + self.metulae.len()
            + self
                .metulae
                .iter()
                .map(|m| m.phialides.len())
                .sum::<usize>()
    }

    pub fn conidia_count(&self) -> usize {
        self.metulae
            .iter()
            .flat_map(|m| &m.phialides)
            .map(|p| p.conidia.len())
            .sum()
    }
}

/// Flattens the tree into segments and circles, stipe base at the origin
/// pointing up (+y).
pub fn fungus_geometry(t: &FungusTree) -> GeometryDescriptor {
    let mut g = GeometryDescriptor::default();
    let base: Point = [0.0, 0.0];
    let stipe_dir = direction(t.stipe.angle);
    let stipe_tip = offset(base, stipe_dir, t.stipe.length);
    g.segments.push(Segment {
        from: base,
        to: stipe_tip,
        thickness: t.stipe.thickness,
    });
    for m in &t.metulae {
        let m_angle = t.stipe.angle + m.branch.angle;
        let m_tip = offset(stipe_tip, direction(m_angle), m.branch.length);
        g.segments.push(Segment {
            from: stipe_tip,
            to: m_tip,
            thickness: m.branch.thickness,
        });
        for p in &m.phialides {
            let p_dir = direction(m_angle + p.branch.angle);
            let p_tip = offset(m_tip, p_dir, p.branch.length);
            g.segments.push(Segment {
                from: m_tip,
                to: p_tip,
                thickness: p.branch.thickness,
            });
            g.circles.extend(p.conidia.iter().map(|c| Circle {
                center: offset(p_tip, p_dir, c.offset),
                radius: c.radius,
            }));
        }
    }
    g
}
