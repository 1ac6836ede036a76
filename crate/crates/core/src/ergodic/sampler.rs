use super::ErgodicError;
use crate::geometry::Square;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Hard cap on the number of sample points one request may generate.
pub const SAMPLE_BUDGET: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Cell centers of a `per_side x per_side` grid, equal weights.
    Grid { per_side: usize },
    /// Uniform points from a counter-based stream keyed by `(seed, index)`.
    Seeded { count: usize, seed: u64 },
}

/// Discretization of the uniform average over translates `w ∈ S_n`.
#[derive(Clone, Copy, Debug)]
pub struct TranslateSampler {
    pub domain: Square,
    pub scheme: Scheme,
}

/// A sampled fraction with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub fraction: f64,
    pub samples: usize,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_hits(hits: usize, samples: usize) -> Self {
        let p = hits as f64 / samples as f64;
        Estimate { fraction: p, samples, std_error: (p * (1.0 - p) / samples as f64).sqrt() }
    }
}

/// The `index`-th point of the seeded stream on `[0,1)^2`, independent of
/// how the indices are scheduled.
pub fn unit_point(seed: u64, index: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Each f64 consumes two 32-bit words.
    rng.set_word_pos(4 * index as u128);
    (rng.random::<f64>(), rng.random::<f64>())
}

impl TranslateSampler {
    pub fn new(domain: Square, scheme: Scheme) -> Self {
        TranslateSampler { domain, scheme }
    }

    pub fn len(&self) -> usize {
        match self.scheme {
            Scheme::Grid { per_side } => per_side * per_side,
            Scheme::Seeded { count, .. } => count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> Complex64 {
        let lo = self.domain.center - Complex64::new(self.domain.half_side, self.domain.half_side);
        let side = self.domain.side();
        let (u, v) = match self.scheme {
            Scheme::Grid { per_side } => {
                let m = per_side as f64;
                (((index % per_side) as f64 + 0.5) / m, ((index / per_side) as f64 + 0.5) / m)
            }
            Scheme::Seeded { seed, .. } => unit_point(seed, index as u64),
        };
        lo + Complex64::new(u * side, v * side)
    }

    fn check(&self) -> Result<(), ErgodicError> {
        if self.len() > SAMPLE_BUDGET {
            return Err(ErgodicError::SamplerBudgetExceeded { requested: self.len(), budget: SAMPLE_BUDGET });
        }
        if self.is_empty() {
            return Err(ErgodicError::NoSamples);
        }
        Ok(())
    }

    /// Apply `f` to every sample point, results in index order.
    pub fn map<T, F>(&self, f: F) -> Result<Vec<T>, ErgodicError>
    where
        T: Send,
        F: Fn(Complex64) -> T + Sync,
    {
        self.check()?;
        Ok((0..self.len()).into_par_iter().map(|i| f(self.point(i))).collect())
    }

    /// Fraction of sample points where `event` holds.
    pub fn fraction<F>(&self, event: F) -> Result<Estimate, ErgodicError>
    where
        F: Fn(Complex64) -> bool + Sync,
    {
        let hits = self.map(event)?.into_iter().filter(|&b| b).count();
        Ok(Estimate::from_hits(hits, self.len()))
    }
}

/// `m x m` nodes of a closed square, corners included.
pub fn square_nodes(square: &Square, m: usize) -> impl Iterator<Item = Complex64> + '_ {
    let lo = square.center - Complex64::new(square.half_side, square.half_side);
    let step = if m > 1 { square.side() / (m - 1) as f64 } else { 0.0 };
    let shift = if m > 1 { Complex64::new(0.0, 0.0) } else { Complex64::new(square.half_side, square.half_side) };
    (0..m * m).map(move |k| lo + shift + Complex64::new((k % m) as f64 * step, (k / m) as f64 * step))
}
