//! Counter-based SplitMix64 stream.
//!
//! Sample `k` of stream `seed` is `mix(seed + (k + 1) * 0x9E3779B97F4A7C15)`
//! with the standard SplitMix64 finalizer. Uniform doubles take the top 53
//! bits: `(z >> 11) * 2^-53`. Sweep sample `i` uses the stream with seed
//! `mix(seed ^ mix((i + 1) * 0x9E3779B97F4A7C15))`. Integers in `lo..=hi` are
//! `lo + raw % (hi - lo + 1)`. Any implementation of these rules reproduces
//! every randomized sweep in this crate.

use crate::measures::DiscreteMeasure;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    seed: u64,
    counter: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { seed, counter: 0 }
    }

    /// An independent stream for sub-task `index` (e.g. sweep sample `index`).
    pub fn substream(seed: u64, index: u64) -> Self {
        SplitMix64::new(mix(seed ^ mix(index.wrapping_add(1).wrapping_mul(GOLDEN))))
    }

    /// The `k`-th raw output, independent of the cursor.
    pub fn at(&self, k: u64) -> u64 {
        mix(self.seed.wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = self.at(self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in lo..=hi.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as usize
    }
}

/// Random atomic measure: `atoms` atoms uniform in `[-half_width, half_width)^dim`
/// with weights uniform in `(w_lo, w_hi]`.
pub fn random_measure(
    rng: &mut SplitMix64,
    dim: usize,
    atoms: usize,
    half_width: f64,
    (w_lo, w_hi): (f64, f64),
) -> DiscreteMeasure {
    let mut m = DiscreteMeasure::empty(dim).expect("dim > 0");
    let mut x = vec![0.0; dim];
    for _ in 0..atoms {
        for c in x.iter_mut() {
            *c = rng.uniform(-half_width, half_width);
        }
        // 1 - U lies in (0, 1], so the weight is strictly above w_lo
        let w = w_lo + (w_hi - w_lo) * (1.0 - rng.next_f64());
        m.push(&x, w).expect("valid atom");
    }
    m
}

/// Random probability measure on the line with `atoms` atoms in
/// `[-half_width, half_width)`.
pub fn random_probability_1d(rng: &mut SplitMix64, atoms: usize, half_width: f64) -> DiscreteMeasure {
    let m = random_measure(rng, 1, atoms, half_width, (0.0, 1.0));
    normalize(&m)
}

/// Rescales to total mass 1, fixing up the last weight so the weights sum to
/// exactly 1.0 in floating point when possible.
pub fn normalize(m: &DiscreteMeasure) -> DiscreteMeasure {
    let mass = m.total_mass();
    let mut weights: Vec<f64> = m.weights().iter().map(|w| w / mass).collect();
    if let Some((last, rest)) = weights.split_last_mut() {
        let head: f64 = rest.iter().sum();
        *last = (1.0 - head).max(0.0);
    }
    DiscreteMeasure::from_parts(m.dim(), m.locations().to_vec(), weights).expect("valid measure")
}
