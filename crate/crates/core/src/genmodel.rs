//! Per-factor MLP yield models and the yield → seaweed shape mapping.
//!
//! Each natural factor has its own small network mapping one physical value
//! to a yield in `[0, 1]`. The five yields are then reduced to the four shape
//! parameters that drive seaweed morphology and price.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ecology::{Factor, NaturalFactors};
use crate::error::{Error, Result};

pub const MODEL_SCHEMA_VERSION: u32 = 1;
pub const DATASET_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Identity,
    Sigmoid,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        }
    }

    /// Derivative expressed through the activation output `a`.
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Identity => 1.0,
            Activation::Sigmoid => a * (1.0 - a),
        }
    }
}

/// Dense layer. `weights` is row-major with shape `(rows, cols)` = `(out, in)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn new(
        rows: usize,
        cols: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        let layer = Self {
            rows,
            cols,
            weights,
            bias,
            activation,
        };
        layer.validate()?;
        Ok(layer)
    }

    fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Config("layer dimensions must be positive".into()));
        }
        if self.weights.len() != self.rows * self.cols || self.bias.len() != self.rows {
            return Err(Error::Config(format!(
                "layer {}x{} has {} weights and {} biases",
                self.rows,
                self.cols,
                self.weights.len(),
                self.bias.len()
            )));
        }
        if self
            .weights
            .iter()
            .chain(&self.bias)
            .any(|v| !v.is_finite())
        {
            return Err(Error::Config("layer parameters must be finite".into()));
        }
        Ok(())
    }

    fn forward_into(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.cols)
                .zip(&self.bias)
                .map(|(row, b)| {
                    let z = row.iter().zip(input).fold(*b, |acc, (w, x)| acc + w * x);
                    self.activation.apply(z)
                }),
        );
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputNorm {
    pub min: f64,
    pub max: f64,
}

impl InputNorm {
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }
}

/// One factor's yield model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub schema_version: u32,
    pub factor: String,
    pub input_norm: InputNorm,
    pub layers: Vec<Layer>,
}

impl MlpModel {
    pub fn new(
        factor: impl Into<String>,
        input_norm: InputNorm,
        layers: Vec<Layer>,
    ) -> Result<Self> {
        let model = Self {
            schema_version: MODEL_SCHEMA_VERSION,
            factor: factor.into(),
            input_norm,
            layers,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported model schema version {}",
                self.schema_version
            )));
        }
        if !(self.input_norm.min < self.input_norm.max) || !self.input_norm.max.is_finite() {
            return Err(Error::Config(format!(
                "input_norm must satisfy min < max, got {:?}",
                self.input_norm
            )));
        }
        let Some(first) = self.layers.first() else {
            return Err(Error::Config("model has no layers".into()));
        };
        if first.cols != 1 {
            return Err(Error::Config("first layer must take one input".into()));
        }
        let mut width = 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.validate()?;
            if layer.cols != width {
                return Err(Error::Config(format!(
                    "layer {i} expects {} inputs but previous layer yields {width}",
                    layer.cols
                )));
            }
            width = layer.rows;
        }
        if width != 1 {
            return Err(Error::Config("final layer must have one output".into()));
        }
        Ok(())
    }

    /// Unclamped network output on an already-normalized input.
    pub fn forward_normalized(&self, xn: f64) -> f64 {
        let mut cur = vec![xn];
        let mut next = Vec::new();
        for layer in &self.layers {
            layer.forward_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        cur[0]
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: Self = serde_json::from_str(&text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Yield for a physical factor value, clamped to `[0, 1]`.
pub fn mlp_forward(model: &MlpModel, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Input(format!(
            "factor value must be finite, got {x}"
        )));
    }
    let y = model.forward_normalized(model.input_norm.normalize(x));
    Ok(if y.is_nan() { 0.0 } else { y.clamp(0.0, 1.0) })
}

// ---------------------------------------------------------------------------
// Datasets and fitting
// ---------------------------------------------------------------------------

/// Factor/yield samples for one factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseCurveDataset {
    pub schema_version: u32,
    pub factor: String,
    /// `(factor value, yield)` pairs.
    pub samples: Vec<[f64; 2]>,
}

impl ResponseCurveDataset {
    pub fn new(factor: impl Into<String>, samples: Vec<[f64; 2]>) -> Result<Self> {
        let ds = Self {
            schema_version: DATASET_SCHEMA_VERSION,
            factor: factor.into(),
            samples,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.len() < 8 {
            return Err(Error::Input(format!(
                "dataset {} needs at least 8 samples, has {}",
                self.factor,
                self.samples.len()
            )));
        }
        if self.samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "dataset {} has non-finite values",
                self.factor
            )));
        }
        if self.samples.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(Error::Input(format!(
                "dataset {} factor values must be strictly increasing",
                self.factor
            )));
        }
        if self.samples.iter().any(|s| !(0.0..=1.0).contains(&s[1])) {
            return Err(Error::Input(format!(
                "dataset {} yields must lie in [0, 1]",
                self.factor
            )));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ds: Self = serde_json::from_str(&text)?;
        ds.validate()?;
        Ok(ds)
    }

    pub fn input_norm(&self) -> InputNorm {
        InputNorm {
            min: self.samples[0][0],
            max: self.samples[self.samples.len() - 1][0],
        }
    }
}

/// Per-layer parameter gradients, laid out like [`Layer`].
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Mean squared error of the unclamped output over normalized `(x, y)` pairs.
pub fn mse(model: &MlpModel, samples: &[(f64, f64)]) -> f64 {
    let sum: f64 = samples
        .iter()
        .map(|&(x, y)| {
            let d = model.forward_normalized(x) - y;
            d * d
        })
        .sum();
    sum / samples.len() as f64
}

/// Loss and its analytic gradient by backpropagation.
pub fn mse_gradient(model: &MlpModel, samples: &[(f64, f64)]) -> (f64, Vec<LayerGradient>) {
    let mut grads: Vec<LayerGradient> = model
        .layers
        .iter()
        .map(|l| LayerGradient {
            weights: vec![0.0; l.weights.len()],
            bias: vec![0.0; l.bias.len()],
        })
        .collect();
    let n = samples.len() as f64;
    let mut loss = 0.0;
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(model.layers.len() + 1);

    for &(x, y) in samples {
        acts.clear();
        acts.push(vec![x]);
        for layer in &model.layers {
            let mut out = Vec::with_capacity(layer.rows);
            layer.forward_into(acts.last().unwrap(), &mut out);
            acts.push(out);
        }
        let err = acts.last().unwrap()[0] - y;
        loss += err * err;

        // dL/da for the current layer's output
        let mut upstream = vec![2.0 * err / n];
        for (li, layer) in model.layers.iter().enumerate().rev() {
            let out = &acts[li + 1];
            let input = &acts[li];
            let delta: Vec<f64> = upstream
                .iter()
                .zip(out)
                .map(|(g, a)| g * layer.activation.derivative_from_output(*a))
                .collect();
            let g = &mut grads[li];
            for (r, d) in delta.iter().enumerate() {
                g.bias[r] += d;
                let row = &mut g.weights[r * layer.cols..(r + 1) * layer.cols];
                for (w, a) in row.iter_mut().zip(input) {
                    *w += d * a;
                }
            }
            if li > 0 {
                upstream = (0..layer.cols)
                    .map(|c| {
                        delta
                            .iter()
                            .enumerate()
                            .map(|(r, d)| layer.weights[r * layer.cols + c] * d)
                            .sum()
                    })
                    .collect();
            }
        }
    }
    (loss / n, grads)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitParams {
    pub hidden: usize,
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            hidden: 8,
            epochs: 20_000,
            lr: 1.0,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model: MlpModel,
    pub mse: f64,
}

fn init_model(factor: &str, norm: InputNorm, hidden: usize, seed: u64) -> Result<MlpModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Hidden units get slopes and offsets wide enough to place their
    // transitions anywhere in the normalized [0, 1] input interval.
    let w1: Vec<f64> = (0..hidden).map(|_| rng.random_range(-4.0..4.0)).collect();
    let b1: Vec<f64> = w1.iter().map(|w| -w * rng.random_range(0.0..1.0)).collect();
    let limit = (6.0 / (hidden as f64 + 1.0)).sqrt();
    let w2: Vec<f64> = (0..hidden)
        .map(|_| rng.random_range(-limit..limit))
        .collect();
    MlpModel::new(
        factor,
        norm,
        vec![
            Layer::new(hidden, 1, w1, b1, Activation::Tanh)?,
            Layer::new(1, hidden, w2, vec![0.0], Activation::Sigmoid)?,
        ],
    )
}

/// Plain full-batch gradient descent; returns the final loss.
fn descend(model: &mut MlpModel, samples: &[(f64, f64)], epochs: usize, lr: f64) -> Result<f64> {
    for epoch in 0..epochs {
        let (loss, grads) = mse_gradient(model, samples);
        if !loss.is_finite() {
            return Err(Error::Fitting { epoch, loss });
        }
        for (layer, g) in model.layers.iter_mut().zip(&grads) {
            for (w, gw) in layer.weights.iter_mut().zip(&g.weights) {
                *w -= lr * gw;
            }
            for (b, gb) in layer.bias.iter_mut().zip(&g.bias) {
                *b -= lr * gb;
            }
        }
    }
    let loss = mse(model, samples);
    if !loss.is_finite() || model.layers.iter().any(|l| l.validate().is_err()) {
        return Err(Error::Fitting {
            epoch: epochs,
            loss,
        });
    }
    Ok(loss)
}

/// Full-batch gradient descent on MSE for a one-hidden-layer Tanh network
/// with Sigmoid output. Deterministic for a given `params.seed`.
pub fn fit_mlp(dataset: &ResponseCurveDataset, params: &FitParams) -> Result<FitReport> {
    dataset.validate()?;
    if params.hidden == 0 || params.epochs == 0 || !(params.lr > 0.0 && params.lr.is_finite()) {
        return Err(Error::Input(format!(
            "fit needs hidden >= 1, epochs >= 1 and lr > 0, got {params:?}"
        )));
    }
    let norm = dataset.input_norm();
    let samples: Vec<(f64, f64)> = dataset
        .samples
        .iter()
        .map(|s| (norm.normalize(s[0]), s[1]))
        .collect();
    let mut model = init_model(&dataset.factor, norm, params.hidden, params.seed)?;
    let final_mse = descend(&mut model, &samples, params.epochs, params.lr)?;
    model.validate()?;
    Ok(FitReport {
        model,
        mse: final_mse,
    })
}

// ---------------------------------------------------------------------------
// Yields and shape
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YieldVector {
    pub temperature_yield: f64,
    pub salinity_yield: f64,
    pub flow_yield: f64,
    pub irradiation_yield: f64,
    pub nutrient_yield: f64,
}

impl YieldVector {
    pub fn uniform(v: f64) -> Self {
        Self {
            temperature_yield: v,
            salinity_yield: v,
            flow_yield: v,
            irradiation_yield: v,
            nutrient_yield: v,
        }
    }

    fn set(&mut self, factor: Factor, v: f64) {
        let slot = match factor {
            Factor::WaterTemperature => &mut self.temperature_yield,
            Factor::Salinity => &mut self.salinity_yield,
            Factor::FlowVelocity => &mut self.flow_yield,
            Factor::Irradiation => &mut self.irradiation_yield,
            Factor::NutrientConcentration => &mut self.nutrient_yield,
        };
        *slot = v;
    }
}

/// Normalized seaweed morphology, every component in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub blade_width: f64,
    pub blade_length: f64,
    pub blade_density: f64,
    pub stipe_length: f64,
}

impl ShapeParams {
    pub fn uniform(v: f64) -> Self {
        Self {
            blade_width: v,
            blade_length: v,
            blade_density: v,
            stipe_length: v,
        }
    }

    pub fn clamped(self) -> Self {
        let c = |v: f64| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        Self {
            blade_width: c(self.blade_width),
            blade_length: c(self.blade_length),
            blade_density: c(self.blade_density),
            stipe_length: c(self.stipe_length),
        }
    }

    pub fn is_valid(&self) -> bool {
        [
            self.blade_width,
            self.blade_length,
            self.blade_density,
            self.stipe_length,
        ]
        .iter()
        .all(|v| (0.0..=1.0).contains(v))
    }
}

/// Share of irradiation in the stipe length; nutrients get the rest.
pub const DEFAULT_STIPE_IRRADIATION_WEIGHT: f64 = 0.5;

/// Width ← salinity, length ← flow, density ← temperature,
/// stipe ← mean of irradiation and nutrients.
pub fn shape_from_yields(y: &YieldVector) -> ShapeParams {
    shape_from_yields_weighted(y, DEFAULT_STIPE_IRRADIATION_WEIGHT)
}

pub fn shape_from_yields_weighted(y: &YieldVector, irradiation_weight: f64) -> ShapeParams {
    let w = irradiation_weight.clamp(0.0, 1.0);
    ShapeParams {
        blade_width: y.salinity_yield,
        blade_length: y.flow_yield,
        blade_density: y.temperature_yield,
        stipe_length: w * y.irradiation_yield + (1.0 - w) * y.nutrient_yield,
    }
    .clamped()
}

/// One model per factor.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelSet {
    models: BTreeMap<Factor, MlpModel>,
}

impl ModelSet {
    pub fn new(models: impl IntoIterator<Item = MlpModel>) -> Result<Self> {
        let mut set = BTreeMap::new();
        for model in models {
            model.validate()?;
            let factor = Factor::from_label(&model.factor).ok_or_else(|| {
                Error::Config(format!("model names unknown factor {:?}", model.factor))
            })?;
            if set.insert(factor, model).is_some() {
                return Err(Error::Config(format!("duplicate model for {factor}")));
            }
        }
        Ok(Self { models: set })
    }

    pub fn get(&self, factor: Factor) -> Option<&MlpModel> {
        self.models.get(&factor)
    }

    pub fn require_complete(&self) -> Result<()> {
        match Factor::ALL.iter().find(|f| !self.models.contains_key(f)) {
            Some(f) => Err(Error::Config(format!("no yield model for {f}"))),
            None => Ok(()),
        }
    }

    /// Models shipped with the crate, fitted from the bundled response curves.
    pub fn bundled() -> Self {
        let models = bundled::MODELS
            .iter()
            .map(|(_, text)| serde_json::from_str::<MlpModel>(text).expect("bundled model parses"));
        Self::new(models).expect("bundled models are valid")
    }

    /// Loads `<factor>.json` for every factor from `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let set = Self::new(
            Factor::ALL
                .iter()
                .map(|f| MlpModel::load(dir.join(format!("{}.json", f.label()))))
                .collect::<Result<Vec<_>>>()?,
        )?;
        set.require_complete()?;
        Ok(set)
    }
}

pub fn yields_from_factors(models: &ModelSet, f: &NaturalFactors) -> Result<YieldVector> {
    let mut y = YieldVector::uniform(0.0);
    for factor in Factor::ALL {
        let model = models
            .get(factor)
            .ok_or_else(|| Error::Config(format!("no yield model for {factor}")))?;
        y.set(factor, mlp_forward(model, f.get(factor))?);
    }
    Ok(y)
}

/// Bundled response-curve datasets, in [`Factor::ALL`] order.
pub fn bundled_datasets() -> Vec<ResponseCurveDataset> {
    bundled::CURVES
        .iter()
        .map(|(_, text)| serde_json::from_str(text).expect("bundled dataset parses"))
        .collect()
}

mod bundled {
    pub(super) const CURVES: [(&str, &str); 5] = [
        (
            "water_temperature",
            include_str!("../data/curves/water_temperature.json"),
        ),
        ("salinity", include_str!("../data/curves/salinity.json")),
        (
            "flow_velocity",
            include_str!("../data/curves/flow_velocity.json"),
        ),
        (
            "irradiation",
            include_str!("../data/curves/irradiation.json"),
        ),
        (
            "nutrient_concentration",
            include_str!("../data/curves/nutrient_concentration.json"),
        ),
    ];

    pub(super) const MODELS: [(&str, &str); 5] = [
        (
            "water_temperature",
            include_str!("../data/models/water_temperature.json"),
        ),
        ("salinity", include_str!("../data/models/salinity.json")),
        (
            "flow_velocity",
            include_str!("../data/models/flow_velocity.json"),
        ),
        (
            "irradiation",
            include_str!("../data/models/irradiation.json"),
        ),
        (
            "nutrient_concentration",
            include_str!("../data/models/nutrient_concentration.json"),
        ),
    ];
}
