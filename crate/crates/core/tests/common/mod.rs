//! Independent reference implementations used as test oracles. Nothing
//! here calls into the production evaluation paths it is compared against.
#![allow(dead_code, clippy::needless_range_loop)]

use seaweed_core::genmodel::{Activation, InputNorm, Layer, MlpModel};

/// Layer-by-layer evaluation with explicit matrices and textbook activations.
pub fn oracle_forward(model: &MlpModel, x: f64) -> f64 {
    oracle_forward_raw(model, x).clamp(0.0, 1.0)
}

/// Unclamped network output.
pub fn oracle_forward_raw(model: &MlpModel, x: f64) -> f64 {
    let mut v = vec![(x - model.input_norm.min) / (model.input_norm.max - model.input_norm.min)];
    for layer in &model.layers {
        let mut matrix = vec![vec![0.0; layer.cols]; layer.rows];
        for r in 0..layer.rows {
            for c in 0..layer.cols {
                matrix[r][c] = layer.weights[r * layer.cols + c];
            }
        }
        let mut next = Vec::with_capacity(layer.rows);
        for r in 0..layer.rows {
            let mut z = layer.bias[r];
            for c in 0..layer.cols {
                z += matrix[r][c] * v[c];
            }
            next.push(match layer.activation {
                Activation::Identity => z,
                Activation::Sigmoid => 0.5 * (1.0 + (0.5 * z).tanh()),
                Activation::Tanh => {
                    let e = (2.0 * z).exp();
                    if e.is_infinite() {
                        1.0
                    } else {
                        (e - 1.0) / (e + 1.0)
                    }
                }
            });
        }
        v = next;
    }
    v[0]
}

/// Mean squared error of the unclamped oracle output.
pub fn oracle_mse(model: &MlpModel, samples: &[(f64, f64)]) -> f64 {
    samples
        .iter()
        .map(|&(x, y)| (oracle_forward_raw(model, x) - y).powi(2))
        .sum::<f64>()
        / samples.len() as f64
}

/// Random model with one or two hidden layers and input_norm (0, 1).
pub fn random_model(rng: &mut Xorshift) -> MlpModel {
    let acts = [Activation::Tanh, Activation::Sigmoid, Activation::Identity];
    let depth = 1 + rng.below(2) as usize;
    let mut width = 1;
    let mut layers = Vec::new();
    for i in 0..=depth {
        let rows = if i == depth {
            1
        } else {
            2 + rng.below(4) as usize
        };
        let act = acts[rng.below(3) as usize];
        let weights = (0..rows * width).map(|_| rng.uniform(-1.5, 1.5)).collect();
        let bias = (0..rows).map(|_| rng.uniform(-0.5, 0.5)).collect();
        layers.push(Layer::new(rows, width, weights, bias, act).unwrap());
        width = rows;
    }
    MlpModel::new("salinity", InputNorm { min: 0.0, max: 1.0 }, layers).unwrap()
}

/// Mutable views of every parameter, layer by layer, weights before biases.
pub fn param_mut(model: &mut MlpModel, mut k: usize) -> &mut f64 {
    for layer in &mut model.layers {
        if k < layer.weights.len() {
            return &mut layer.weights[k];
        }
        k -= layer.weights.len();
        if k < layer.bias.len() {
            return &mut layer.bias[k];
        }
        k -= layer.bias.len();
    }
    panic!("parameter index out of range")
}

pub fn param_count(model: &MlpModel) -> usize {
    model
        .layers
        .iter()
        .map(|l| l.weights.len() + l.bias.len())
        .sum()
}

/// Central finite-difference gradient of the oracle loss.
pub fn finite_difference_gradient(model: &MlpModel, samples: &[(f64, f64)], h: f64) -> Vec<f64> {
    (0..param_count(model))
        .map(|k| {
            let mut plus = model.clone();
            *param_mut(&mut plus, k) += h;
            let mut minus = model.clone();
            *param_mut(&mut minus, k) -= h;
            (oracle_mse(&plus, samples) - oracle_mse(&minus, samples)) / (2.0 * h)
        })
        .collect()
}

/// Second implementation of the documented seeded gradient noise.
pub struct OracleNoise {
    p: [usize; 256],
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl OracleNoise {
    pub fn new(seed: u64) -> Self {
        let mut p = [0usize; 256];
        for (i, slot) in p.iter_mut().enumerate() {
            *slot = i;
        }
        let mut s = seed;
        let mut i = 255;
        while i >= 1 {
            let j = (splitmix(&mut s) % (i as u64 + 1)) as usize;
            p.swap(i, j);
            i -= 1;
        }
        Self { p }
    }

    fn grad_dot(&self, ix: i64, iy: i64, dx: f64, dy: f64) -> f64 {
        let xi = ix.rem_euclid(256) as usize;
        let yi = iy.rem_euclid(256) as usize;
        let h = self.p[(self.p[xi] + yi) % 256] % 8;
        match h {
            0 => dx + dy,
            1 => -dx + dy,
            2 => dx - dy,
            3 => -dx - dy,
            4 => dx,
            5 => -dx,
            6 => dy,
            _ => -dy,
        }
    }

    pub fn value01(&self, x: f64, y: f64) -> f64 {
        let fx0 = x.floor();
        let fy0 = y.floor();
        let (ix, iy) = (fx0 as i64, fy0 as i64);
        let (tx, ty) = (x - fx0, y - fy0);
        let s = |t: f64| t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
        let (sx, sy) = (s(tx), s(ty));
        let a = self.grad_dot(ix, iy, tx, ty);
        let b = self.grad_dot(ix + 1, iy, tx - 1.0, ty);
        let c = self.grad_dot(ix, iy + 1, tx, ty - 1.0);
        let d = self.grad_dot(ix + 1, iy + 1, tx - 1.0, ty - 1.0);
        let bottom = a + sx * (b - a);
        let top = c + sx * (d - c);
        let n = bottom + sy * (top - bottom);
        ((n + 1.0) * 0.5).clamp(0.0, 1.0)
    }

    pub fn fraction_above(&self, edge: f64, scale: f64, resolution: usize) -> f64 {
        let mut lit = 0usize;
        for row in 0..resolution {
            for col in 0..resolution {
                let x = (col as f64 + 0.5) * (scale / resolution as f64);
                let y = (row as f64 + 0.5) * (scale / resolution as f64);
                if self.value01(x, y) > edge {
                    lit += 1;
                }
            }
        }
        lit as f64 / (resolution * resolution) as f64
    }
}

/// Small xorshift generator for building random test fixtures.
pub struct Xorshift(pub u64);

impl Xorshift {
    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((self.next() >> 11) as f64 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// Norm-wise relative error `‖a − b‖ / max(‖a‖ + ‖b‖, tiny)`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / (na + nb).max(1e-300)
}
