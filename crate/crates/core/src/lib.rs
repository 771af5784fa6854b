//! Seaweed-swarm ecosystem simulation core.
//!
//! Token insertions drive an ecological index (EI) through a periodic
//! three-stage curve. EI sets five natural factors, per-factor MLPs turn
//! those into yields and seaweed shape, and shape sets the harvest price.
//! A single oomycete infects the swarm and is cured by cultivated fungi.
//! Harvest proceeds are settled into whole tokens on a fixed period.
//!
//! [`engine::Engine`] owns all mutable state and advances it on a fixed
//! timestep; everything else is pure functions and plain data.

// `!(x > 0.0)` style checks are used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ecology;
pub mod economy;
pub mod engine;
pub mod error;
pub mod fungigen;
pub mod genmodel;
pub mod geometry;
pub mod noise;
pub mod pathology;
pub mod policy;
pub mod snapshot;
pub mod swarm;

pub use engine::{Engine, EngineConfig, EventKind, SimEvent, SimState, Target};
pub use error::{Error, Result};
pub use snapshot::Snapshot;
