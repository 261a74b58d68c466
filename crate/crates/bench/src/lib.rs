//! Seeded inputs shared by the benchmarks.

use gspx_core::graphon::KernelRange;
use gspx_core::linalg::Matrix;
use gspx_core::sampling::rng_for;
use gspx_core::{Graph, GraphSignal, StepGraphon};
use rand::Rng;

/// Dense weighted graph with weights in `[-1, 1)`.
pub fn weighted_graph(n: usize, seed: u64) -> Graph {
    let mut rng = rng_for(seed);
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((i, j, rng.gen_range(-1.0..1.0)));
        }
    }
    Graph::new(n, &edges).expect("valid edges")
}

pub fn signal(n: usize, seed: u64) -> GraphSignal {
    let mut rng = rng_for(seed);
    GraphSignal::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("finite")
}

pub fn step_graphon(n: usize, seed: u64) -> StepGraphon {
    let mut rng = rng_for(seed);
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen::<f64>();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    StepGraphon::new(m, KernelRange::UNIT).expect("unit entries")
}
