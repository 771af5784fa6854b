//! Python module `seaweed`: the engine plus the pure model functions.
//!
//! Structured results (snapshots, factors, trees) come back as plain
//! dicts decoded from the same JSON the service emits.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use seaweed_core::ecology::{self, EcoConfig};
use seaweed_core::fungigen::{self, FungusSpecies};
use seaweed_core::genmodel::{self, YieldVector};
use seaweed_core::pathology::{self, DiseaseMaskParams};
use seaweed_core::policy::{self, PolicyScript};
use seaweed_core::{EngineConfig, EventKind, SimEvent, Target};

fn py_err(e: seaweed_core::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.kind()))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| py_err(e.into()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn load_config(config: Option<PathBuf>, seed: Option<u64>) -> PyResult<EngineConfig> {
    let mut cfg = match config {
        Some(p) => EngineConfig::load(p).map_err(py_err)?,
        None => EngineConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn parse_target(target: &str) -> PyResult<Target> {
    match target {
        "seaweed" => Ok(Target::Seaweed),
        "fungi" => Ok(Target::Fungi),
        other => Err(PyValueError::new_err(format!("unknown target {other:?}"))),
    }
}

/// The simulated world, advanced explicitly by the caller.
#[pyclass(module = "seaweed")]
struct Engine {
    inner: seaweed_core::Engine,
}

#[pymethods]
impl Engine {
    #[new]
    #[pyo3(signature = (config=None, seed=None))]
    fn new(config: Option<PathBuf>, seed: Option<u64>) -> PyResult<Self> {
        let inner = seaweed_core::Engine::new(load_config(config, seed)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn tick(&self) -> u64 {
        self.inner.state().tick
    }

    /// Inserts one token into `target` ("seaweed" or "fungi") at the current tick.
    fn insert_token(&mut self, target: &str) -> PyResult<()> {
        let kind = EventKind::InsertToken {
            target: parse_target(target)?,
        };
        self.apply(kind)
    }

    fn switch_target(&mut self) -> PyResult<()> {
        self.apply(EventKind::SwitchTarget)
    }

    fn reset(&mut self) -> PyResult<()> {
        self.apply(EventKind::Reset)
    }

    /// Advances `n` ticks and returns the new tick.
    #[pyo3(signature = (n=1))]
    fn step(&mut self, n: u64) -> u64 {
        for _ in 0..n {
            self.inner.tick();
        }
        self.inner.state().tick
    }

    fn state_hash(&self) -> String {
        self.inner.state_hash()
    }

    fn snapshot<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.snapshot())
    }

    fn snapshot_json(&self) -> String {
        self.inner.snapshot().to_json()
    }
}

impl Engine {
    fn apply(&mut self, kind: EventKind) -> PyResult<()> {
        let event = SimEvent::new(self.inner.state().tick, kind);
        self.inner.apply_event(&event).map(|_| ()).map_err(py_err)
    }
}

#[pyfunction]
fn ei_from_insertions(c: u32) -> PyResult<f64> {
    ecology::ei_from_insertions(c, &EcoConfig::default()).map_err(py_err)
}

#[pyfunction]
fn stage_of(c: u32) -> PyResult<&'static str> {
    ecology::stage_of(c, &EcoConfig::default())
        .map(|s| s.as_str())
        .map_err(py_err)
}

#[pyfunction]
fn factors_from_ei<'py>(py: Python<'py>, ei: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &ecology::factors_from_ei(ei, &EcoConfig::default()))
}

/// Yields of the bundled models for the factors at `ei`.
#[pyfunction]
fn yields_at<'py>(py: Python<'py>, ei: f64) -> PyResult<Bound<'py, PyAny>> {
    let factors = ecology::factors_from_ei(ei, &EcoConfig::default());
    let y =
        genmodel::yields_from_factors(&genmodel::ModelSet::bundled(), &factors).map_err(py_err)?;
    to_py(py, &y)
}

#[pyfunction]
fn shape_from_yields<'py>(
    py: Python<'py>,
    temperature: f64,
    salinity: f64,
    flow: f64,
    irradiation: f64,
    nutrients: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let y = YieldVector {
        temperature_yield: temperature,
        salinity_yield: salinity,
        flow_yield: flow,
        irradiation_yield: irradiation,
        nutrient_yield: nutrients,
    };
    to_py(py, &genmodel::shape_from_yields(&y))
}

#[pyfunction]
#[pyo3(signature = (edge, noise_scale, seed, resolution=64))]
fn disease_mask_fraction(
    edge: f64,
    noise_scale: f64,
    seed: u64,
    resolution: usize,
) -> PyResult<f64> {
    let params = DiseaseMaskParams {
        edge,
        noise_scale,
        seed,
    };
    pathology::disease_mask_fraction(&params, resolution).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (seed, species="penicillium_like"))]
fn generate_fungus<'py>(py: Python<'py>, seed: u64, species: &str) -> PyResult<Bound<'py, PyAny>> {
    let species = match species {
        "penicillium_like" => FungusSpecies::penicillium_like(),
        "aspergillus_like" => FungusSpecies::aspergillus_like(),
        other => return Err(PyValueError::new_err(format!("unknown species {other:?}"))),
    };
    to_py(py, &fungigen::generate_fungus(&species, seed))
}

/// Runs a policy (JSON text) headless. Returns `{"csv", "final_hash", "final_state"}`.
#[pyfunction]
#[pyo3(signature = (policy, duration, config=None, seed=None, sample_every=10))]
fn simulate<'py>(
    py: Python<'py>,
    policy: &str,
    duration: f64,
    config: Option<PathBuf>,
    seed: Option<u64>,
    sample_every: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = load_config(config, seed)?;
    let policy: PolicyScript = serde_json::from_str(policy)
        .map_err(|e| py_err(seaweed_core::Error::Input(format!("policy: {e}"))))?;
    let out = policy::simulate(&cfg, &policy, duration, sample_every).map_err(py_err)?;
    to_py(
        py,
        &serde_json::json!({
            "csv": out.to_csv(),
            "final_hash": out.final_hash,
            "final_state": out.final_state,
        }),
    )
}

#[pymodule]
fn seaweed(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Engine>()?;
    m.add_function(wrap_pyfunction!(ei_from_insertions, m)?)?;
    m.add_function(wrap_pyfunction!(stage_of, m)?)?;
    m.add_function(wrap_pyfunction!(factors_from_ei, m)?)?;
    m.add_function(wrap_pyfunction!(yields_at, m)?)?;
    m.add_function(wrap_pyfunction!(shape_from_yields, m)?)?;
    m.add_function(wrap_pyfunction!(disease_mask_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(generate_fungus, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functions_round_trip_through_python() {
        Python::initialize();
        Python::attach(|py| {
            assert_eq!(ei_from_insertions(0).unwrap(), 0.0);
            assert!(ei_from_insertions(500).is_err());
            assert_eq!(stage_of(100).unwrap(), "crisis");
            let f = factors_from_ei(py, 0.0).unwrap();
            assert_eq!(
                f.get_item("salinity").unwrap().extract::<f64>().unwrap(),
                30.0
            );
            let t = generate_fungus(py, 3, "aspergillus_like").unwrap();
            assert_eq!(
                t.get_item("species").unwrap().extract::<String>().unwrap(),
                "aspergillus_like"
            );
            assert!(generate_fungus(py, 3, "mushroom").is_err());
        });
    }

    #[test]
    fn engine_matches_core() {
        Python::initialize();
        Python::attach(|_py| {
            let mut e = Engine::new(None, Some(9)).unwrap();
            e.insert_token("seaweed").unwrap();
            assert!(e.insert_token("plastic").is_err());
            e.step(5);
            let mut core = seaweed_core::Engine::new(EngineConfig {
                seed: 9,
                ..EngineConfig::default()
            })
            .unwrap();
            core.step(&[SimEvent::seaweed(0)]).unwrap();
            for _ in 0..4 {
                core.tick();
            }
            assert_eq!(e.state_hash(), core.state_hash());
        });
    }
}
