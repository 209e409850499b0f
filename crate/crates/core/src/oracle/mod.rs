//! Independent checks for the analytic bounds: Monte Carlo volume
//! estimates, cubature for concentric-ellipsoid intersections, truncated
//! sums over field elements, empirical moments of random ℤ-lattices, unit
//! enumeration and Mahler measures.

mod geometry;
mod lattice;
mod mahler;
mod sums;

pub use geometry::*;
pub use lattice::*;
pub use mahler::*;
pub use sums::*;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Mean of i.i.d. samples with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// √(σ₁² + σ₂²).
    pub fn combined_sigma(&self, other: &McEstimate) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

/// Samples per RNG stream for volume estimates.
pub const CHUNK: usize = 4096;

/// Runs `samples` draws of `f`, each writing `width` values, and returns one
/// estimate per value. Chunk c uses ChaCha8 seeded with `seed` on stream c
/// and chunk sums are reduced in chunk order, so the result does not depend
/// on the number of worker threads.
pub fn run_chunks<F>(samples: usize, seed: u64, width: usize, chunk: usize, f: F) -> Vec<McEstimate>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let chunk = chunk.max(1);
    let n_chunks = samples.div_ceil(chunk);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = chunk.min(samples - c * chunk);
            let mut s = vec![0.0; width];
            let mut s2 = vec![0.0; width];
            let mut out = vec![0.0; width];
            for _ in 0..len {
                f(&mut rng, &mut out);
                for ((si, s2i), &o) in s.iter_mut().zip(s2.iter_mut()).zip(&out) {
                    *si += o;
                    *s2i += o * o;
                }
            }
            (s, s2)
        })
        .collect();
    let mut s = vec![0.0; width];
    let mut s2 = vec![0.0; width];
    for (a, b) in &partial {
        for i in 0..width {
            s[i] += a[i];
            s2[i] += b[i];
        }
    }
    let n = samples as f64;
    (0..width)
        .map(|i| {
            let mean = s[i] / n;
            let var = if samples > 1 { ((s2[i] - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
            McEstimate { mean, std_error: (var / n).sqrt(), samples, seed }
        })
        .collect()
}

/// One line of a JSON verification report.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationRecord {
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub estimate: f64,
    pub sigma: f64,
    pub bound: f64,
    pub verdict: bool,
}

impl VerificationRecord {
    pub fn new(check: &str, params: &[(&str, String)], estimate: f64, sigma: f64, bound: f64, verdict: bool) -> Self {
        VerificationRecord {
            check: check.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            estimate,
            sigma,
            bound,
            verdict,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunked_estimates_are_thread_independent() {
        let f = |rng: &mut ChaCha8Rng, out: &mut [f64]| {
            let u: f64 = rng.random();
            out[0] = u;
            out[1] = u * u;
        };
        let a = run_chunks(50_000, 9, 2, CHUNK, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_chunks(50_000, 9, 2, CHUNK, f));
        assert_eq!(a, b);
        assert!((a[0].mean - 0.5).abs() < 4.0 * a[0].std_error);
        assert!((a[1].mean - 1.0 / 3.0).abs() < 4.0 * a[1].std_error);
        let c = run_chunks(50_000, 10, 2, CHUNK, f);
        assert_ne!(a[0].mean, c[0].mean);
    }
}
