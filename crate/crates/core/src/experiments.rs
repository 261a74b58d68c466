//! Experiments comparing graph Fourier transforms across graph sizes: the
//! air-pollution sensor network, the transform convergence check against a
//! graphon reference, and user-subsampling on MovieLens ratings.
//!
//! Coefficients from different graphs are compared by sorted magnitude, which
//! sidesteps matching eigenvectors across independent samples.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pearson_similarity_graph, Graph, GraphSignal, RatingTable};
use crate::graphon::{AnalyticKernel, AnalyticSignal, Graphon, GraphonSignal};
use crate::linalg::Matrix;
use crate::sampling::{rng_for, rng_stream, sample_graphon_signal, sample_w_random_graph};
use crate::spectral::{gft_magnitudes, wft_magnitudes, Coefficient, FourierCoefficients};

/// Quantile levels reported by the pollution experiment.
pub const POLLUTION_LEVELS: [f64; 3] = [0.68, 0.95, 0.997];

/// `W(u, v) = exp(-beta |u - v|)`: edge probability between sensors at normalized
/// cross-wind positions `u` and `v`.
pub fn pollution_graphon(beta: f64) -> Result<Graphon> {
    Ok(AnalyticKernel::soft_geometric(beta)?.into())
}

/// `S(u) = exp(-u² / (2 sigma_y²))`, concentration with the source at `u = 0`.
pub fn pollution_signal(sigma_y: f64) -> Result<GraphonSignal> {
    Ok(AnalyticSignal::gaussian(sigma_y)?.into())
}

/// Empirical quantiles with linear interpolation between order statistics:
/// level `p` maps to position `(m - 1) p` of the sorted sample.
pub fn quantiles(samples: &[f64], levels: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter(
            "quantiles of an empty sample".into(),
        ));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("quantile sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    levels
        .iter()
        .map(|&p| {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::OutOfRange {
                    value: p,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            let h = (sorted.len() - 1) as f64 * p;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(sorted.len() - 1);
            Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
        })
        .collect()
}

fn median(samples: &[f64]) -> Result<f64> {
    Ok(quantiles(samples, &[0.5])?[0])
}

fn mean_and_std(samples: &[f64]) -> (f64, f64) {
    let m = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / m;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, var.sqrt())
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter(
            "rank correlation needs two points".into(),
        ));
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let (mx, _) = mean_and_std(&rx);
    let (my, _) = mean_and_std(&ry);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `‖sort↓|a| − sort↓|b|‖₂ / ‖a‖₂` on raw coefficient values or magnitudes.
pub fn sorted_magnitude_difference(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let sa = sorted_desc(a.iter().map(|x| x.abs()).collect());
    let sb = sorted_desc(b.iter().map(|x| x.abs()).collect());
    let reference = sa.iter().map(|x| x * x).sum::<f64>().sqrt();
    if reference == 0.0 {
        return Err(Error::InvalidParameter(
            "reference coefficients have zero norm".into(),
        ));
    }
    let diff = sa
        .iter()
        .zip(&sb)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(diff / reference)
}

/// Normalized difference between two transforms after sorting coefficient magnitudes.
pub fn min_norm_gft_difference(a: &FourierCoefficients, b: &FourierCoefficients) -> Result<f64> {
    sorted_magnitude_difference(&a.values(), &b.values())
}

fn check_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "n_grid must be non-empty, positive and strictly ascending, got {n_grid:?}"
        )));
    }
    Ok(())
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PollutionConfig {
    pub beta: f64,
    pub sigma_y: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
}

impl Default for PollutionConfig {
    fn default() -> Self {
        Self {
            beta: 3.0,
            sigma_y: 0.3,
            n_grid: vec![50, 100, 200, 400, 800],
            trials: 50,
            master_seed: 1,
        }
    }
}

impl PollutionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("sigma_y", self.sigma_y)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        check_trials(self.trials)?;
        check_grid(&self.n_grid)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub n: usize,
    pub q68: f64,
    pub q95: f64,
    pub q997: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantileTable {
    pub rows: Vec<QuantileRow>,
    /// Per-row differences, sorted ascending.
    pub samples: Vec<Vec<f64>>,
}

impl QuantileTable {
    pub fn medians(&self) -> Result<Vec<f64>> {
        self.samples.iter().map(|s| median(s)).collect()
    }
}

/// One pollution trial: sample two `n`-sensor networks on the given streams and
/// return the normalized sorted-magnitude difference of their transforms.
pub fn pollution_difference(
    cfg: &PollutionConfig,
    n: usize,
    stream_a: u64,
    stream_b: u64,
) -> Result<f64> {
    let w = pollution_graphon(cfg.beta)?;
    let s = pollution_signal(cfg.sigma_y)?;
    let magnitudes = |stream| -> Result<Vec<f64>> {
        let (g, labels) = sample_w_random_graph(&w, n, cfg.master_seed, stream)?;
        let x = sample_graphon_signal(&s, &labels)?;
        Ok(gft_magnitudes(&g, &x)?.magnitudes())
    };
    sorted_magnitude_difference(&magnitudes(stream_a)?, &magnitudes(stream_b)?)
}

/// Per graph size, quantiles of the difference between transforms of two
/// independently sampled sensor networks. Trial `t` at grid position `i` samples
/// its pair on streams `2(i · trials + t)` and `2(i · trials + t) + 1`.
pub fn run_pollution_experiment(cfg: &PollutionConfig) -> Result<QuantileTable> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    let mut samples = Vec::with_capacity(cfg.n_grid.len());
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let mut diffs = (0..cfg.trials)
            .map(|t| {
                let base = 2 * (i * cfg.trials + t) as u64;
                pollution_difference(cfg, n, base, base + 1)
            })
            .collect::<Result<Vec<f64>>>()?;
        diffs.sort_by(f64::total_cmp);
        let q = quantiles(&diffs, &POLLUTION_LEVELS)?;
        log::info!(
            "pollution n={n}: q68={:.4} q95={:.4} q997={:.4}",
            q[0],
            q[1],
            q[2]
        );
        rows.push(QuantileRow {
            n,
            q68: q[0],
            q95: q[1],
            q997: q[2],
        });
        samples.push(diffs);
    }
    Ok(QuantileTable { rows, samples })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem1Config {
    pub cutoff: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    /// Reference resolution; defaults to `4 · max(n_grid)`.
    pub n_ref: Option<usize>,
}

impl Default for Theorem1Config {
    fn default() -> Self {
        Self {
            cutoff: 0.05,
            n_grid: vec![50, 100, 200, 400, 800],
            trials: 20,
            master_seed: 1,
            n_ref: None,
        }
    }
}

impl Theorem1Config {
    pub fn reference_resolution(&self) -> usize {
        self.n_ref
            .unwrap_or(4 * self.n_grid.last().copied().unwrap_or(1))
    }

    pub fn validate(&self) -> Result<()> {
        check_trials(self.trials)?;
        check_grid(&self.n_grid)?;
        if !(self.cutoff > 0.0 && self.cutoff < 1.0) {
            return Err(Error::OutOfRange {
                value: self.cutoff,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let max_n = *self.n_grid.last().expect("grid checked non-empty");
        if self.reference_resolution() < 4 * max_n {
            return Err(Error::InvalidParameter(format!(
                "reference resolution {} is below 4 x {max_n}",
                self.reference_resolution()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Row {
    pub n: usize,
    pub median_error: f64,
    pub mean_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Table {
    pub rows: Vec<Theorem1Row>,
    pub n_ref: usize,
    /// Reference coefficients with `|σ| ≥ cutoff`.
    pub retained: usize,
    pub non_derogatory: bool,
}

/// Coefficient magnitudes of the `k` largest `|σ|`, sorted descending.
fn top_by_sigma(mut entries: Vec<Coefficient>, k: usize) -> Vec<f64> {
    entries.sort_by(|a, b| {
        b.sigma
            .abs()
            .total_cmp(&a.sigma.abs())
            .then(a.index.cmp(&b.index))
    });
    sorted_desc(entries.into_iter().take(k).map(|c| c.value).collect())
}

/// Samples `(G_n, x_n)` from `(W, X)` and measures how far `|x̂_n| / √n` sits from
/// the graphon transform restricted to `|σ| ≥ cutoff`.
///
/// With `K` retained reference coefficients, the graph side keeps the `K`
/// coefficients of largest `|λ/n|`. Both lists are sorted by magnitude and the
/// error is their Euclidean distance. Trial `t` at grid position `i` uses stream `i · trials + t`.
pub fn run_theorem1_check(
    w: &Graphon,
    x: &GraphonSignal,
    cfg: &Theorem1Config,
) -> Result<Theorem1Table> {
    cfg.validate()?;
    let n_ref = cfg.reference_resolution();
    let reference = wft_magnitudes(&w.discretize(n_ref)?, &x.discretize(n_ref)?)?;
    let kept: Vec<Coefficient> = reference
        .entries
        .iter()
        .filter(|c| c.sigma.abs() >= cfg.cutoff)
        .cloned()
        .collect();
    let k = kept.len();
    let non_derogatory = distinct_nonzero(kept.iter().map(|c| c.sigma));
    if !non_derogatory {
        log::warn!("reference operator has a repeated eigenvalue above the cutoff at N = {n_ref}");
    }
    let target = top_by_sigma(kept, k);

    let mut rows = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let errors = (0..cfg.trials)
            .map(|t| {
                let stream = (i * cfg.trials + t) as u64;
                let (g, labels) = sample_w_random_graph(w, n, cfg.master_seed, stream)?;
                let xn = sample_graphon_signal(x, &labels)?;
                let scale = (n as f64).sqrt();
                let graph_side: Vec<f64> = top_by_sigma(gft_magnitudes(&g, &xn)?.entries, k)
                    .into_iter()
                    .map(|v| v / scale)
                    .collect();
                let err: f64 = target
                    .iter()
                    .enumerate()
                    .map(|(j, t)| (graph_side.get(j).copied().unwrap_or(0.0) - t).powi(2))
                    .sum();
                Ok(err.sqrt())
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean_error, _) = mean_and_std(&errors);
        rows.push(Theorem1Row {
            n,
            median_error: median(&errors)?,
            mean_error,
        });
    }
    Ok(Theorem1Table {
        rows,
        n_ref,
        retained: k,
        non_derogatory,
    })
}

fn distinct_nonzero(sigmas: impl Iterator<Item = f64>) -> bool {
    let mut s: Vec<f64> = sigmas.filter(|&v| v != 0.0).collect();
    s.sort_by(f64::total_cmp);
    let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    s.windows(2).all(|w| w[1] - w[0] > 1e-10 * scale)
}

/// How users who did not rate the reference movie get a value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Imputation {
    /// The user's mean rating.
    #[default]
    UserMean,
    /// The mean rating the movie received.
    ItemMean,
}

impl std::str::FromStr for Imputation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "user-mean" => Ok(Self::UserMean),
            "item-mean" => Ok(Self::ItemMean),
            _ => Err(Error::InvalidParameter(format!(
                "unknown imputation policy {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferConfig {
    /// 1-based movie id as in the ratings file; 1 is "Toy Story".
    pub movie: usize,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub imputation: Imputation,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            movie: 1,
            n_grid: vec![50, 100, 200, 400],
            trials: 10,
            master_seed: 1,
            imputation: Imputation::UserMean,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    pub n: usize,
    pub mean_rel_diff: f64,
    pub std_rel_diff: f64,
}

/// Rating of `movie` per user, imputed where missing.
pub fn reference_signal(r: &RatingTable, movie: usize, policy: Imputation) -> Result<GraphSignal> {
    if movie == 0 || movie > r.num_items() {
        return Err(Error::Data(format!(
            "movie id {movie} not in 1..={}",
            r.num_items()
        )));
    }
    let item = movie - 1;
    let rated: Vec<f64> = (0..r.num_users())
        .filter_map(|u| r.rating(u, item))
        .collect();
    if rated.is_empty() {
        return Err(Error::Data(format!("movie {movie} has no ratings")));
    }
    let item_mean = rated.iter().sum::<f64>() / rated.len() as f64;
    let values = (0..r.num_users())
        .map(|u| {
            r.rating(u, item).unwrap_or_else(|| match policy {
                Imputation::UserMean => r.user_mean(u).unwrap_or(item_mean),
                Imputation::ItemMean => item_mean,
            })
        })
        .collect();
    GraphSignal::new(values)
}

fn submatrix(m: &Matrix, idx: &[usize]) -> Matrix {
    Matrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

/// Transferability of the transform across user subsamples.
///
/// The reference is the transform of the imputed rating signal on the Pearson graph
/// of all `U` users. Each trial draws `n` users without replacement (stream
/// `i · trials + t`), takes the induced subgraph and restricted signal, and compares
/// `sort↓|x̂_n| / √n` with the `n` reference coefficients of largest `|σ|`, scaled by
/// `1 / √U` and sorted the same way. The `1/√n` and `1/√U` factors put both
/// transforms on the graphon scale; without them the ratio of norms alone drives
/// the metric towards `1 − √(n/U)`.
pub fn run_movielens_experiment(cfg: &TransferConfig, r: &RatingTable) -> Result<Vec<TransferRow>> {
    check_trials(cfg.trials)?;
    check_grid(&cfg.n_grid)?;
    let users = r.num_users();
    if let Some(&bad) = cfg.n_grid.iter().find(|&&n| n > users) {
        return Err(Error::InvalidParameter(format!(
            "n = {bad} exceeds the {users} available users"
        )));
    }
    if cfg.n_grid[0] < 2 {
        return Err(Error::InvalidParameter(
            "subsamples need at least 2 users".into(),
        ));
    }
    let x = reference_signal(r, cfg.movie, cfg.imputation)?;
    let all: Vec<usize> = (0..users).collect();
    let full = pearson_similarity_graph(r, &all)?;
    let full_scale = (users as f64).sqrt();
    let reference = gft_magnitudes(&full, &x)?.entries;

    let mut rows = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        let target: Vec<f64> = top_by_sigma(reference.clone(), n)
            .into_iter()
            .map(|v| v / full_scale)
            .collect();
        let diffs = (0..cfg.trials)
            .map(|t| {
                let mut rng = rng_for(rng_stream(cfg.master_seed, (i * cfg.trials + t) as u64));
                let mut chosen = sample(&mut rng, users, n).into_vec();
                chosen.sort_unstable();
                let g = Graph::from_weights(submatrix(full.weights(), &chosen))?;
                let xn = GraphSignal::new(chosen.iter().map(|&u| x.values()[u]).collect())?;
                let scale = (n as f64).sqrt();
                let ours: Vec<f64> = gft_magnitudes(&g, &xn)?
                    .magnitudes()
                    .into_iter()
                    .map(|v| v / scale)
                    .collect();
                sorted_magnitude_difference(&target, &ours)
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean, std) = mean_and_std(&diffs);
        log::info!("movielens n={n}: mean={mean:.5} std={std:.5}");
        rows.push(TransferRow {
            n,
            mean_rel_diff: mean,
            std_rel_diff: std,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Rating;
    use crate::spectral::{Domain, SignedIndex};
    use proptest::prelude::*;

    #[test]
    fn quantile_examples() {
        assert_eq!(
            quantiles(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.5]).unwrap(),
            vec![3.0]
        );
        assert_eq!(quantiles(&[0.0, 10.0], &[0.25]).unwrap(), vec![2.5]);
        assert_eq!(
            quantiles(&[4.0; 7], &[0.1, 0.5, 0.997]).unwrap(),
            vec![4.0; 3]
        );
        assert!(quantiles(&[], &[0.5]).is_err());
        assert!(quantiles(&[1.0], &[1.0]).is_err());
        assert!(quantiles(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(
            spearman_correlation(&x, &[10.0, 20.0, 30.0, 40.0]).unwrap(),
            1.0
        );
        assert_eq!(
            spearman_correlation(&x, &[9.0, 4.0, 1.0, 0.5]).unwrap(),
            -1.0
        );
        // ties share the average rank
        let r = spearman_correlation(&[1.0, 2.0, 3.0], &[1.0, 1.0, 2.0]).unwrap();
        assert!((r - 0.866025403784).abs() < 1e-9);
    }

    fn coeffs(values: &[f64]) -> FourierCoefficients {
        FourierCoefficients {
            domain: Domain::Graph { n: values.len() },
            coefficients: values
                .iter()
                .enumerate()
                .map(|(k, &v)| Coefficient {
                    index: SignedIndex::new(k as i64 + 1).unwrap(),
                    sigma: 1.0 / (k + 1) as f64,
                    value: v,
                })
                .collect(),
        }
    }

    #[test]
    fn difference_examples() {
        let a = coeffs(&[3.0, 4.0, 0.0]);
        assert_eq!(min_norm_gft_difference(&a, &a).unwrap(), 0.0);
        assert_eq!(
            min_norm_gft_difference(&a, &coeffs(&[-3.0, -4.0, 0.0])).unwrap(),
            0.0
        );
        assert_eq!(
            min_norm_gft_difference(&a, &coeffs(&[0.0, 4.0, 3.0])).unwrap(),
            0.0
        );
        assert!(min_norm_gft_difference(&a, &coeffs(&[1.0])).is_err());
        assert!(min_norm_gft_difference(&coeffs(&[0.0, 0.0]), &coeffs(&[1.0, 0.0])).is_err());
        assert_eq!(
            sorted_magnitude_difference(&[1.0, 0.0], &[0.0, 0.0]).unwrap(),
            1.0
        );
    }

    #[test]
    fn pollution_model() {
        let w = pollution_graphon(2.0).unwrap();
        assert_eq!(w.eval(0.3, 0.3).unwrap(), 1.0);
        assert!((w.eval(0.25, 0.75).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(w.eval(0.1, 0.7).unwrap(), w.eval(0.7, 0.1).unwrap());
        let s = pollution_signal(0.5).unwrap();
        assert_eq!(s.eval(0.0).unwrap(), 1.0);
        assert!((s.eval(0.5).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert!(pollution_graphon(0.0).is_err());
        assert!(pollution_signal(-1.0).is_err());
    }

    #[test]
    fn shared_samples_give_zero_difference() {
        let cfg = PollutionConfig::default();
        for n in [5, 30] {
            assert_eq!(pollution_difference(&cfg, n, 4, 4).unwrap(), 0.0);
        }
    }

    #[test]
    fn small_pollution_run() {
        let cfg = PollutionConfig {
            n_grid: vec![10, 40],
            trials: 6,
            ..Default::default()
        };
        let t = run_pollution_experiment(&cfg).unwrap();
        assert_eq!(t.rows.len(), 2);
        for r in &t.rows {
            assert!(0.0 <= r.q68 && r.q68 <= r.q95 && r.q95 <= r.q997);
        }
        assert_eq!(t, run_pollution_experiment(&cfg).unwrap());
        let bad = PollutionConfig {
            n_grid: vec![40, 10],
            ..Default::default()
        };
        assert!(run_pollution_experiment(&bad).is_err());
    }

    #[test]
    fn theorem1_constant_kernel_and_zero_signal() {
        let w: Graphon = AnalyticKernel::constant(0.5).unwrap().into();
        let cfg = Theorem1Config {
            n_grid: vec![20, 80],
            trials: 5,
            ..Default::default()
        };
        let one = run_theorem1_check(&w, &AnalyticSignal::Constant(1.0).into(), &cfg).unwrap();
        assert_eq!(one.retained, 1);
        for row in &one.rows {
            assert!(row.median_error <= 10.0 / (row.n as f64).sqrt(), "{row:?}");
        }
        let zero = run_theorem1_check(&w, &AnalyticSignal::Constant(0.0).into(), &cfg).unwrap();
        assert!(zero
            .rows
            .iter()
            .all(|r| r.median_error == 0.0 && r.mean_error == 0.0));
        let low = Theorem1Config {
            n_ref: Some(100),
            ..cfg
        };
        assert!(run_theorem1_check(&w, &AnalyticSignal::Constant(1.0).into(), &low).is_err());
    }

    /// Users in two taste groups that agree within the group and disagree across.
    fn synthetic_ratings(users: usize, items: usize) -> RatingTable {
        let mut entries = Vec::new();
        for u in 0..users {
            let group = u % 2;
            for i in 0..items {
                if (u * 7 + i * 3) % 5 == 0 {
                    continue;
                }
                let base = if (i % 2 == 0) == (group == 0) {
                    4.0
                } else {
                    2.0
                };
                let jitter = ((u * 31 + i * 17) % 3) as f64 - 1.0;
                entries.push(Rating {
                    user: u,
                    item: i,
                    rating: (base + jitter).clamp(1.0, 5.0),
                });
            }
        }
        RatingTable::new(users, items, entries).unwrap()
    }

    #[test]
    fn reference_signal_imputation() {
        let r = RatingTable::new(
            2,
            2,
            vec![
                Rating {
                    user: 0,
                    item: 0,
                    rating: 5.0,
                },
                Rating {
                    user: 1,
                    item: 1,
                    rating: 2.0,
                },
                Rating {
                    user: 1,
                    item: 0,
                    rating: 3.0,
                },
                Rating {
                    user: 0,
                    item: 1,
                    rating: 1.0,
                },
            ],
        )
        .unwrap();
        let x = reference_signal(&r, 1, Imputation::UserMean).unwrap();
        assert_eq!(x.values(), &[5.0, 3.0]);
        let sparse = RatingTable::new(
            2,
            2,
            vec![
                Rating {
                    user: 0,
                    item: 0,
                    rating: 5.0,
                },
                Rating {
                    user: 1,
                    item: 1,
                    rating: 2.0,
                },
            ],
        )
        .unwrap();
        assert_eq!(
            reference_signal(&sparse, 1, Imputation::UserMean)
                .unwrap()
                .values(),
            &[5.0, 2.0]
        );
        assert_eq!(
            reference_signal(&sparse, 1, Imputation::ItemMean)
                .unwrap()
                .values(),
            &[5.0, 5.0]
        );
        assert!(reference_signal(&sparse, 3, Imputation::UserMean).is_err());
        assert!(reference_signal(&sparse, 0, Imputation::UserMean).is_err());
    }

    #[test]
    fn movielens_pipeline_on_synthetic_ratings() {
        let r = synthetic_ratings(60, 12);
        let full = TransferConfig {
            n_grid: vec![60],
            trials: 1,
            ..Default::default()
        };
        let rows = run_movielens_experiment(&full, &r).unwrap();
        assert_eq!(rows[0].mean_rel_diff, 0.0);

        let cfg = TransferConfig {
            n_grid: vec![10, 30],
            trials: 3,
            ..Default::default()
        };
        let rows = run_movielens_experiment(&cfg, &r).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows, run_movielens_experiment(&cfg, &r).unwrap());
        let too_many = TransferConfig {
            n_grid: vec![61],
            ..Default::default()
        };
        assert!(run_movielens_experiment(&too_many, &r).is_err());
    }

    proptest! {
        #[test]
        fn difference_ignores_order_and_sign(
            a in proptest::collection::vec(-5.0f64..5.0, 1..20),
            seed in any::<u64>(),
        ) {
            prop_assume!(a.iter().any(|&v| v != 0.0));
            let mut b = a.clone();
            let mut rng = rng_for(seed);
            use rand::seq::SliceRandom;
            use rand::Rng;
            b.shuffle(&mut rng);
            for v in &mut b {
                if rng.gen::<bool>() {
                    *v = -*v;
                }
            }
            prop_assert_eq!(sorted_magnitude_difference(&a, &b).unwrap(), 0.0);
        }

        #[test]
        fn difference_bounded_by_norm_ratio(
            a in proptest::collection::vec(-5.0f64..5.0, 8),
            b in proptest::collection::vec(-5.0f64..5.0, 8),
        ) {
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assume!(na > 1e-6);
            let d = sorted_magnitude_difference(&a, &b).unwrap();
            prop_assert!(d >= 0.0 && d <= 1.0 + nb / na + 1e-12);
        }

        #[test]
        fn quantiles_are_monotone(xs in proptest::collection::vec(-100.0f64..100.0, 1..50)) {
            let q = quantiles(&xs, &POLLUTION_LEVELS).unwrap();
            prop_assert!(q[0] <= q[1] && q[1] <= q[2]);
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(q.iter().all(|&v| lo <= v && v <= hi));
        }
    }
}
