//! W-random graphs and signals sampled at the same latent labels.
//!
//! Randomness is ChaCha8 keyed by a 64-bit stream seed. Stream seeds come from
//! [`rng_stream`], the SplitMix64 finalizer applied to
//! `master ^ (trial · 0x9E3779B97F4A7C15)`. Both steps are bijections on `u64`, so
//! distinct trials under one master seed never share a stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSignal};
use crate::graphon::{Graphon, GraphonSignal};
use crate::linalg::Matrix;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream seed for trial `trial_index` under `master_seed`.
pub fn rng_stream(master_seed: u64, trial_index: u64) -> u64 {
    splitmix64(master_seed ^ trial_index.wrapping_mul(GOLDEN_GAMMA))
}

/// The generator behind a stream seed.
pub fn rng_for(stream_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed)
}

/// Latent positions of sampled nodes and where they came from.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleLabels {
    pub u: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl SampleLabels {
    pub fn new(u: Vec<f64>, seed: u64, stream: u64) -> Result<Self> {
        if let Some(&bad) = u.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::ArgumentOutsideUnitInterval(bad));
        }
        Ok(Self { u, seed, stream })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Draws labels `u_i ~ U[0, 1)` for `i = 0..n`, then for every `i < j` in
/// lexicographic order keeps edge `(i, j)` when a fresh uniform falls below `W(u_i, u_j)`.
pub fn sample_w_random_graph(
    w: &Graphon,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<(Graph, SampleLabels)> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "cannot sample a graph with 0 nodes".into(),
        ));
    }
    if !w.range().is_probability() {
        return Err(Error::SignedKernel(
            "W-random sampling needs a kernel with values in [0, 1]",
        ));
    }
    let mut rng = rng_for(rng_stream(seed, stream));
    let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < w.value(u[i], u[j]) {
                a[(i, j)] = 1.0;
                a[(j, i)] = 1.0;
            }
        }
    }
    Ok((Graph::from_weights(a)?, SampleLabels { u, seed, stream }))
}

/// `[x]_i = X(u_i)` at the labels of a sampled graph.
pub fn sample_graphon_signal(x: &GraphonSignal, labels: &SampleLabels) -> Result<GraphSignal> {
    GraphSignal::new(labels.u.iter().map(|&u| x.value(u)).collect())
}
