//! Homomorphism densities into graphs and graphons, cycle densities through
//! the spectrum, and the exact cut norm of step graphons.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphon::{Graphon, StepGraphon};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::sampling::{rng_for, rng_stream, sample_w_random_graph};
use crate::spectral::SignedSpectrum;

/// Largest `n^{n'}` the brute-force enumeration will attempt.
pub const ENUMERATION_BUDGET: f64 = 1e8;
pub const MAX_MOTIF_NODES: usize = 6;
/// Largest block count accepted by the exhaustive cut-norm search.
pub const MAX_CUT_NORM_BLOCKS: usize = 24;
/// Slack applied to both inequalities of the norm sandwich.
pub const SANDWICH_SLACK: f64 = 1e-9;

const MC_CHUNK: usize = 4096;

/// A small simple undirected graph used as a pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Motif {
    name: String,
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Motif {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let name = format!("motif{n}:{}", edges.len());
        Self::named(name, n, edges)
    }

    pub fn named(name: impl Into<String>, n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "a motif needs at least one node".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for &(i, j) in &edges {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::InvalidParameter(format!(
                    "motif edge ({i}, {j}) repeated"
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            edges,
        })
    }

    pub fn single_node() -> Self {
        Self {
            name: "node".into(),
            n: 1,
            edges: vec![],
        }
    }

    pub fn edge() -> Self {
        Self {
            name: "edge".into(),
            n: 2,
            edges: vec![(0, 1)],
        }
    }

    /// The `k`-cycle, `k ≥ 3`.
    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidParameter(format!(
                "a simple cycle needs at least 3 nodes, got {k}"
            )));
        }
        let name = if k == 3 {
            "triangle".to_string()
        } else {
            format!("C{k}")
        };
        Ok(Self {
            name,
            n: k,
            edges: (0..k).map(|i| (i, (i + 1) % k)).collect(),
        })
    }

    pub fn triangle() -> Self {
        Self::cycle(3).expect("3-cycle is valid")
    }

    /// Built-in motifs: `edge`, `triangle`, `C<k>`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "edge" | "K2" => Some(Self::edge()),
            "triangle" | "C3" => Some(Self::triangle()),
            "node" => Some(Self::single_node()),
            _ => name
                .strip_prefix('C')
                .and_then(|k| k.parse().ok())
                .and_then(|k| Self::cycle(k).ok()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `Some(k)` when the motif is a single `k`-cycle.
    pub fn cycle_length(&self) -> Option<usize> {
        let k = self.n;
        if k < 3 || self.edges.len() != k {
            return None;
        }
        let mut adj = vec![Vec::new(); k];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        if adj.iter().any(|a| a.len() != 2) {
            return None;
        }
        let (mut prev, mut cur, mut steps) = (0, adj[0][0], 1);
        while cur != 0 {
            let next = if adj[cur][0] == prev {
                adj[cur][1]
            } else {
                adj[cur][0]
            };
            prev = cur;
            cur = next;
            steps += 1;
        }
        (steps == k).then_some(k)
    }
}

fn check_budget(n: usize, nodes: usize) -> Result<()> {
    let maps = (n as f64).powi(nodes as i32);
    if maps > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{n}^{nodes} maps exceed {ENUMERATION_BUDGET:e}; use the cycle shortcut for cycles"
        )));
    }
    Ok(())
}

/// Sum over all maps of the product of edge weights. `edges` may contain parallel edges.
fn weighted_map_sum(nodes: usize, edges: &[(usize, usize)], a: &Matrix) -> f64 {
    // For each pattern node, the earlier pattern nodes it is joined to.
    let mut back = vec![Vec::new(); nodes];
    for &(i, j) in edges {
        let (lo, hi) = (i.min(j), i.max(j));
        back[hi].push(lo);
    }
    let mut assign = vec![0usize; nodes];
    fn rec(t: usize, back: &[Vec<usize>], assign: &mut [usize], prod: f64, a: &Matrix) -> f64 {
        if t == back.len() {
            return prod;
        }
        let mut sum = 0.0;
        for v in 0..a.rows() {
            let mut p = prod;
            for &s in &back[t] {
                p *= a[(assign[s], v)];
                if p == 0.0 {
                    break;
                }
            }
            if p != 0.0 {
                assign[t] = v;
                sum += rec(t + 1, back, assign, p, a);
            }
        }
        sum
    }
    rec(0, &back, &mut assign, 1.0, a)
}

/// `hom(F, G) = Σ_β Π_{(i,j)∈E'} A(β(i), β(j))` by exhaustive enumeration.
pub fn hom_count(f: &Motif, g: &Graph) -> Result<f64> {
    if f.nodes() > MAX_MOTIF_NODES {
        return Err(Error::BudgetExceeded(format!(
            "motif has {} nodes, at most {MAX_MOTIF_NODES} are enumerated",
            f.nodes()
        )));
    }
    check_budget(g.n(), f.nodes())?;
    Ok(weighted_map_sum(f.nodes(), f.edges(), g.weights()))
}

/// Number of closed walks of length `k ≥ 2` counted by brute force over all `n^k` maps
/// of the `k`-cycle (for `k = 2` the cycle is a doubled edge).
pub fn closed_walk_count(k: usize, g: &Graph) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "cycle length must be at least 2, got {k}"
        )));
    }
    check_budget(g.n(), k)?;
    let edges: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    Ok(weighted_map_sum(k, &edges, g.weights()))
}

/// `t(F, G) = hom(F, G) / n^{n'}`
pub fn hom_density_graph(f: &Motif, g: &Graph) -> Result<f64> {
    Ok(hom_count(f, g)? / (g.n() as f64).powi(f.nodes() as i32))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    /// Set when the kernel can be negative; the value is then not a density.
    pub signed_kernel: bool,
}

#[derive(Clone, Copy, Default)]
struct Moments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        Moments {
            count,
            mean: self.mean + delta * nb / count as f64,
            m2: self.m2 + other.m2 + delta * delta * na * nb / count as f64,
        }
    }
}

/// Monte-Carlo estimate of `t(F, W) = ∫ Π_{(i,j)∈E'} W(u_i, u_j) du`.
///
/// Draws are split into fixed chunks of 4096 samples, chunk `c` using stream
/// `rng_stream(seed, c)`, so the estimate depends only on `(samples, seed)`.
pub fn hom_density_graphon_mc(
    f: &Motif,
    w: &Graphon,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples < 100 {
        return Err(Error::InvalidParameter(format!(
            "at least 100 samples are required, got {samples}"
        )));
    }
    let signed_kernel = w.range().lo < 0.0;
    if signed_kernel {
        log::warn!("Monte-Carlo homomorphism density on a signed kernel is not a density");
    }
    let mut total = Moments::default();
    let mut u = vec![0.0; f.nodes()];
    for (chunk, start) in (0..samples).step_by(MC_CHUNK).enumerate() {
        let len = MC_CHUNK.min(samples - start);
        let mut rng = rng_for(rng_stream(seed, chunk as u64));
        let mut m = Moments::default();
        for _ in 0..len {
            u.iter_mut().for_each(|x| *x = rng.gen::<f64>());
            let prod = f
                .edges()
                .iter()
                .fold(1.0, |p, &(i, j)| p * w.value(u[i], u[j]));
            m.push(prod);
        }
        total = total.merge(m);
    }
    let var = if total.count > 1 {
        total.m2 / (total.count - 1) as f64
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        estimate: total.mean,
        stderr: (var.max(0.0) / total.count as f64).sqrt(),
        samples,
        signed_kernel,
    })
}

/// `tr(M^k)` by repeated multiplication; exact for small integer matrices.
pub fn trace_power(m: &Matrix, k: usize) -> f64 {
    if k == 0 {
        return m.rows() as f64;
    }
    let mut p = m.clone();
    for _ in 1..k {
        p = p.matmul(m);
    }
    p.trace()
}

fn check_cycle_length(k: usize) -> Result<()> {
    if k < 2 {
        Err(Error::InvalidParameter(format!(
            "cycle length must be at least 2, got {k}"
        )))
    } else {
        Ok(())
    }
}

/// `t(C_k, G) = Σ_j λ_j^k / n^k` from the eigenvalues of the shift operator.
pub fn cycle_density_graph(k: usize, g: &Graph) -> Result<f64> {
    check_cycle_length(k)?;
    let n = g.n() as f64;
    let eig = symmetric_eigenvalues(g.weights())?;
    Ok(eig.iter().map(|l| (l / n).powi(k as i32)).sum())
}

/// `t(C_k, W) = Σ_j σ_j^k` over the indices available in `spectrum`.
pub fn cycle_density_graphon(k: usize, spectrum: &SignedSpectrum) -> Result<f64> {
    check_cycle_length(k)?;
    Ok(spectrum.sigmas().map(|s| s.powi(k as i32)).sum())
}

pub fn l2_operator_norm(spectrum: &SignedSpectrum) -> f64 {
    spectrum.operator_norm()
}

/// Exact cut norm of a step graphon together with maximizing block sets.
#[derive(Clone, Debug, PartialEq)]
pub struct CutNorm {
    pub value: f64,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// `‖W‖_□ = max_{S,T} |∫_{S×T} W|`.
///
/// The objective is bilinear in the block membership fractions, so the optimum sits
/// on unions of blocks. Row sets are enumerated in Gray-code order; for each one the
/// best column set keeps every column whose partial sum has the winning sign.
pub fn cut_norm_step(w: &StepGraphon) -> Result<CutNorm> {
    let n = w.blocks();
    if n > MAX_CUT_NORM_BLOCKS {
        return Err(Error::BudgetExceeded(format!(
            "exact cut norm enumerates 2^N row sets; N = {n} exceeds {MAX_CUT_NORM_BLOCKS}"
        )));
    }
    let v = w.values();
    let mut colsum = vec![0.0; n];
    let mut mask: u32 = 0;
    let mut best = (0.0f64, 0u32, true);
    for step in 1u32..(1u32 << n) {
        let bit = step.trailing_zeros() as usize;
        mask ^= 1 << bit;
        let sign = if mask & (1 << bit) != 0 { 1.0 } else { -1.0 };
        for (c, x) in colsum.iter_mut().zip(v.row(bit)) {
            *c += sign * x;
        }
        let (mut pos, mut neg) = (0.0, 0.0);
        for &c in &colsum {
            if c > 0.0 {
                pos += c;
            } else {
                neg -= c;
            }
        }
        if pos > best.0 {
            best = (pos, mask, true);
        }
        if neg > best.0 {
            best = (neg, mask, false);
        }
    }
    let (_, mask, positive) = best;
    let rows: Vec<usize> = (0..n).filter(|&j| mask & (1 << j) != 0).collect();
    let cols: Vec<usize> = (0..n)
        .filter(|&k| {
            let s: f64 = rows.iter().map(|&j| v[(j, k)]).sum();
            if positive {
                s > 0.0
            } else {
                s < 0.0
            }
        })
        .collect();
    // fresh row-major sum so the reported value does not carry Gray-code drift
    let mut total = 0.0;
    for &j in &rows {
        for &k in &cols {
            total += v[(j, k)];
        }
    }
    Ok(CutNorm {
        value: total.abs() / (n * n) as f64,
        rows,
        cols,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSandwich {
    pub cut: f64,
    pub opnorm: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

impl NormSandwich {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

/// Checks `‖W‖_□ ≤ ‖T_W‖ ≤ √(8 ‖W‖_□)` with the exact cut norm and the spectral operator norm.
pub fn check_norm_sandwich(w: &StepGraphon) -> Result<NormSandwich> {
    let cut = cut_norm_step(w)?.value;
    let n = w.blocks() as f64;
    let opnorm = symmetric_eigenvalues(w.values())?
        .iter()
        .fold(0.0f64, |m, l| m.max((l / n).abs()));
    Ok(NormSandwich {
        cut,
        opnorm,
        lower_holds: cut <= opnorm + SANDWICH_SLACK,
        upper_holds: opnorm <= (8.0 * cut).sqrt() + SANDWICH_SLACK,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub motif: String,
    pub reference: f64,
    pub mean_abs_error: f64,
    pub stderr: f64,
}

/// Samples reused for the graphon-side reference density of non-constant kernels.
pub const REFERENCE_MC_SAMPLES: usize = 100_000;

/// Mean `|t(F, G_n) − t(F, W)|` over W-random graphs, per motif and graph size.
///
/// Trial `t` at grid position `i` uses stream `i · trials + t`. The reference
/// `t(F, W)` is exact for constant kernels and a seeded Monte-Carlo estimate otherwise.
pub fn homomorphism_convergence_trace(
    w: &Graphon,
    motifs: &[Motif],
    n_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let references = motifs
        .iter()
        .map(|f| match w.is_constant() {
            Some(p) => Ok(p.powi(f.edges().len() as i32)),
            None => hom_density_graphon_mc(f, w, REFERENCE_MC_SAMPLES, rng_stream(seed, u64::MAX))
                .map(|e| e.estimate),
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut errors = vec![vec![Vec::with_capacity(trials); motifs.len()]; n_grid.len()];
    for (i, &n) in n_grid.iter().enumerate() {
        for t in 0..trials {
            let (g, _) = sample_w_random_graph(w, n, seed, (i * trials + t) as u64)?;
            for (m, f) in motifs.iter().enumerate() {
                let density = match hom_density_graph(f, &g) {
                    Ok(d) => d,
                    Err(Error::BudgetExceeded(msg)) => match f.cycle_length() {
                        Some(k) => trace_power(g.weights(), k) / (n as f64).powi(k as i32),
                        None => return Err(Error::BudgetExceeded(msg)),
                    },
                    Err(e) => return Err(e),
                };
                errors[i][m].push((density - references[m]).abs());
            }
        }
    }

    let mut rows = Vec::new();
    for (i, &n) in n_grid.iter().enumerate() {
        for (m, f) in motifs.iter().enumerate() {
            let errs = &errors[i][m];
            let mean = errs.iter().sum::<f64>() / trials as f64;
            let var = if trials > 1 {
                errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
            } else {
                0.0
            };
            rows.push(ConvergenceRow {
                n,
                motif: f.name().to_string(),
                reference: references[m],
                mean_abs_error: mean,
                stderr: (var / trials as f64).sqrt(),
            });
        }
    }
    Ok(rows)
}
