//! Seeded 2D lattice gradient noise.
//!
//! The algorithm is fixed so other implementations (the browser client) can
//! reproduce the same field bit-for-bit from a seed:
//!
//! 1. Permutation: start from `p = [0, 1, …, 255]`; for `i` from 255 down to 1
//!    draw `r` from SplitMix64(seed) and swap `p[i]` with `p[r % (i + 1)]`.
//! 2. Lattice hash: `h(ix, iy) = p[(p[ix & 255] + (iy & 255)) & 255]`.
//! 3. Gradient: `GRADIENTS[h & 7]` from the eight vectors below.
//! 4. Value at `(x, y)`: dot products of the four corner gradients with the
//!    offset vectors, blended with the quintic fade `6t⁵ − 15t⁴ + 10t³`,
//!    first along x then along y.
//! 5. Normalization: `(n + 1) / 2`, clamped to `[0, 1]`.

use serde::{Deserialize, Serialize};

const GRADIENTS: [(f64, f64); 8] = [
    (1.0, 1.0),
    (-1.0, 1.0),
    (1.0, -1.0),
    (-1.0, -1.0),
    (1.0, 0.0),
    (-1.0, 0.0),
    (0.0, 1.0),
    (0.0, -1.0),
];

/// SplitMix64 stream; also used to derive per-purpose seeds.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradientNoise {
    perm: Vec<u8>,
}

fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

impl GradientNoise {
    pub fn new(seed: u64) -> Self {
        let mut perm: Vec<u8> = (0..=255).collect();
        let mut rng = SplitMix64::new(seed);
        for i in (1..256usize).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            perm.swap(i, j);
        }
        Self { perm }
    }

    fn hash(&self, ix: i64, iy: i64) -> u8 {
        let a = self.perm[(ix & 255) as usize] as i64;
        self.perm[((a + (iy & 255)) & 255) as usize]
    }

    fn corner(&self, ix: i64, iy: i64, dx: f64, dy: f64) -> f64 {
        let (gx, gy) = GRADIENTS[(self.hash(ix, iy) & 7) as usize];
        gx * dx + gy * dy
    }

    /// Raw noise, roughly in `[-1, 1]`, zero at lattice points.
    pub fn raw(&self, x: f64, y: f64) -> f64 {
        let (x0, y0) = (x.floor(), y.floor());
        let (ix, iy) = (x0 as i64, y0 as i64);
        let (fx, fy) = (x - x0, y - y0);
        let n00 = self.corner(ix, iy, fx, fy);
        let n10 = self.corner(ix + 1, iy, fx - 1.0, fy);
        let n01 = self.corner(ix, iy + 1, fx, fy - 1.0);
        let n11 = self.corner(ix + 1, iy + 1, fx - 1.0, fy - 1.0);
        let (u, v) = (fade(fx), fade(fy));
        lerp(lerp(n00, n10, u), lerp(n01, n11, u), v)
    }

    /// Noise mapped to `[0, 1]`.
    pub fn normalized(&self, x: f64, y: f64) -> f64 {
        ((self.raw(x, y) + 1.0) * 0.5).clamp(0.0, 1.0)
    }

    /// Row-major `resolution × resolution` samples over the unit square
    /// stretched by `scale`; cell `(i, j)` is sampled at its centre.
    pub fn grid(&self, scale: f64, resolution: usize) -> Vec<f64> {
        let step = scale / resolution as f64;
        let mut out = Vec::with_capacity(resolution * resolution);
        for j in 0..resolution {
            let y = (j as f64 + 0.5) * step;
            for i in 0..resolution {
                let x = (i as f64 + 0.5) * step;
                out.push(self.normalized(x, y));
            }
        }
        out
    }
}
