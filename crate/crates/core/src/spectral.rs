//! Signed spectra, graph and graphon Fourier transforms.
//!
//! Spectral components are indexed by `j ∈ ℤ∖{0}`: strictly positive
//! eigenvalues take `j = 1, 2, …` in descending order, numerically zero
//! eigenvalues continue on the positive side, and strictly negative ones take
//! `j = -1, -2, …` starting from the most negative.
//!
//! A step graphon with block matrix `V` on `N` blocks has operator eigenvalues
//! `λ_j(V)/N`, step eigenfunctions `√N · v_j`, and Fourier coefficients
//! `v_jᵀx/√N`. [`wft_step`] computes exactly these, so the transform of an
//! induced graph signal agrees with the GFT up to the `1/√n` scaling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSignal};
use crate::graphon::{
    AnalyticKernel, AnalyticSignal, Graphon, GraphonSignal, StepGraphon, StepSignal,
};
use crate::linalg::{axpy, dot, eigen_projection, Matrix, SymmetricEigen};

/// Eigenvalues within this fraction of the largest magnitude are treated as zero.
pub const ZERO_EIGENVALUE_TOLERANCE: f64 = 1e-12;

/// Coefficients at or below this magnitude count as vanished for bandlimiting.
pub const BANDLIMIT_TOLERANCE: f64 = 1e-12;

/// A nonzero signed spectral index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct SignedIndex(i64);

impl SignedIndex {
    pub fn new(j: i64) -> Option<Self> {
        (j != 0).then_some(Self(j))
    }

    pub fn get(self) -> i64 {
        self.0
    }
}

impl TryFrom<i64> for SignedIndex {
    type Error = String;

    fn try_from(j: i64) -> std::result::Result<Self, String> {
        Self::new(j).ok_or_else(|| "spectral index 0 is not allowed".to_string())
    }
}

impl From<SignedIndex> for i64 {
    fn from(j: SignedIndex) -> i64 {
        j.0
    }
}

impl fmt::Display for SignedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Where a spectrum lives: on an `n`-node graph or on step functions over `N` blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Graph { n: usize },
    Graphon { blocks: usize },
}

impl Domain {
    pub fn size(self) -> usize {
        match self {
            Self::Graph { n } => n,
            Self::Graphon { blocks } => blocks,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralComponent {
    pub index: SignedIndex,
    pub sigma: f64,
    /// Unit eigenvector (graph domain) or block values of the unit-L² step eigenfunction (graphon domain).
    pub vector: Vec<f64>,
}

/// Signed-index assignment: `(j, original position, eigenvalue with zeros snapped to 0)`,
/// returned in spectrum order `1, 2, …, -1, -2, …`.
pub fn signed_order(values: &[f64]) -> Vec<(SignedIndex, usize, f64)> {
    let scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let zero_tol = ZERO_EIGENVALUE_TOLERANCE * scale;
    let mut positive = Vec::new();
    let mut zero = Vec::new();
    let mut negative = Vec::new();
    for (pos, &v) in values.iter().enumerate() {
        if v.abs() <= zero_tol {
            zero.push(pos);
        } else if v > 0.0 {
            positive.push(pos);
        } else {
            negative.push(pos);
        }
    }
    // stable sorts keep the original order among ties
    positive.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    negative.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut out = Vec::with_capacity(values.len());
    for (k, pos) in positive.into_iter().chain(zero).enumerate() {
        let v = if values[pos].abs() <= zero_tol {
            0.0
        } else {
            values[pos]
        };
        out.push((SignedIndex(k as i64 + 1), pos, v));
    }
    for (k, pos) in negative.into_iter().enumerate() {
        out.push((SignedIndex(-(k as i64) - 1), pos, values[pos]));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignedSpectrum {
    domain: Domain,
    components: Vec<SpectralComponent>,
}

impl SignedSpectrum {
    /// Assigns signed indices to eigenpairs given in arbitrary order.
    pub fn from_pairs(domain: Domain, pairs: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let size = domain.size();
        if let Some((_, v)) = pairs.iter().find(|(_, v)| v.len() != size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                actual: v.len(),
            });
        }
        let values: Vec<f64> = pairs.iter().map(|(s, _)| *s).collect();
        let mut vectors: Vec<Option<Vec<f64>>> = pairs.into_iter().map(|(_, v)| Some(v)).collect();
        let components = signed_order(&values)
            .into_iter()
            .map(|(index, pos, sigma)| SpectralComponent {
                index,
                sigma,
                vector: vectors[pos].take().expect("each position used once"),
            })
            .collect();
        Ok(Self { domain, components })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn components(&self) -> &[SpectralComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn get(&self, j: SignedIndex) -> Option<&SpectralComponent> {
        self.components.iter().find(|c| c.index == j)
    }

    pub fn sigma(&self, j: SignedIndex) -> f64 {
        self.get(j).map_or(0.0, |c| c.sigma)
    }

    pub fn sigmas(&self) -> impl Iterator<Item = f64> + '_ {
        self.components.iter().map(|c| c.sigma)
    }

    pub fn indices(&self) -> impl Iterator<Item = SignedIndex> + '_ {
        self.components.iter().map(|c| c.index)
    }

    /// Largest `|σ_j|`, the L² operator norm of the underlying operator.
    pub fn operator_norm(&self) -> f64 {
        self.sigmas().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// Block values of each eigenfunction as an element of L²[0,1] on `self.domain().size()` blocks.
    fn step_values(&self, c: &SpectralComponent) -> Vec<f64> {
        match self.domain {
            Domain::Graph { n } => {
                let s = (n as f64).sqrt();
                c.vector.iter().map(|x| x * s).collect()
            }
            Domain::Graphon { .. } => c.vector.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub index: SignedIndex,
    pub sigma: f64,
    pub value: f64,
}

/// Transform coefficients in spectrum order, each tagged with its eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficients {
    pub domain: Domain,
    pub coefficients: Vec<Coefficient>,
}

impl FourierCoefficients {
    /// Coefficient at `j`; zero for indices outside the spectrum.
    pub fn get(&self, j: SignedIndex) -> f64 {
        self.coefficients
            .iter()
            .find(|c| c.index == j)
            .map_or(0.0, |c| c.value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.value).collect()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.value * c.value)
            .sum::<f64>()
            .sqrt()
    }

    /// Rows sorted by descending `|σ|`, then ascending `j`.
    pub fn sorted_rows(&self) -> Vec<Coefficient> {
        let mut rows = self.coefficients.clone();
        rows.sort_by(|a, b| {
            b.sigma
                .abs()
                .total_cmp(&a.sigma.abs())
                .then(a.index.cmp(&b.index))
        });
        rows
    }
}

fn project(spectrum: &SignedSpectrum, x: &[f64], scale: f64) -> FourierCoefficients {
    FourierCoefficients {
        domain: spectrum.domain,
        coefficients: spectrum
            .components
            .iter()
            .map(|c| Coefficient {
                index: c.index,
                sigma: c.sigma,
                value: dot(&c.vector, x) * scale,
            })
            .collect(),
    }
}

/// Signed spectrum of the graph's shift operator.
pub fn graph_spectrum(g: &Graph) -> Result<SignedSpectrum> {
    let eig = SymmetricEigen::new(g.weights())?;
    let n = g.n();
    let pairs = (0..n)
        .map(|i| (eig.values[i], eig.vector(i).to_vec()))
        .collect();
    SignedSpectrum::from_pairs(Domain::Graph { n }, pairs)
}

/// `x̂_j = ⟨φ_j, x⟩` against an already computed graph spectrum.
pub fn gft_with(spectrum: &SignedSpectrum, x: &GraphSignal) -> Result<FourierCoefficients> {
    let n = match spectrum.domain {
        Domain::Graph { n } => n,
        Domain::Graphon { .. } => {
            return Err(Error::InvalidParameter("GFT needs a graph spectrum".into()));
        }
    };
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    Ok(project(spectrum, x.values(), 1.0))
}

pub fn gft(g: &Graph, x: &GraphSignal) -> Result<FourierCoefficients> {
    if x.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            actual: x.len(),
        });
    }
    gft_with(&graph_spectrum(g)?, x)
}

fn synthesize(spectrum: &SignedSpectrum, c: &FourierCoefficients) -> Result<Vec<f64>> {
    if c.domain != spectrum.domain {
        return Err(Error::InvalidParameter(format!(
            "coefficients on {:?} do not match spectrum on {:?}",
            c.domain, spectrum.domain
        )));
    }
    let mut out = vec![0.0; spectrum.domain.size()];
    for coef in &c.coefficients {
        let comp = spectrum.get(coef.index).ok_or_else(|| {
            Error::InvalidParameter(format!("index {} not in spectrum", coef.index))
        })?;
        crate::linalg::axpy(coef.value, &comp.vector, &mut out);
    }
    Ok(out)
}

pub fn igft_with(spectrum: &SignedSpectrum, c: &FourierCoefficients) -> Result<GraphSignal> {
    if c.len() != spectrum.len() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.len(),
            actual: c.len(),
        });
    }
    GraphSignal::new(synthesize(spectrum, c)?)
}

pub fn igft(g: &Graph, c: &FourierCoefficients) -> Result<GraphSignal> {
    if c.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            actual: c.len(),
        });
    }
    igft_with(&graph_spectrum(g)?, c)
}

/// Spectrum of the integral operator of a step graphon.
pub fn step_spectrum(w: &StepGraphon) -> Result<SignedSpectrum> {
    let eig = SymmetricEigen::new(w.values())?;
    let n = w.blocks();
    let nf = n as f64;
    let root = nf.sqrt();
    let pairs = (0..n)
        .map(|i| {
            (
                eig.values[i],
                eig.vector(i).iter().map(|x| x * root).collect(),
            )
        })
        .collect();
    let mut spectrum = SignedSpectrum::from_pairs(Domain::Graphon { blocks: n }, pairs)?;
    for c in &mut spectrum.components {
        c.sigma /= nf;
    }
    Ok(spectrum)
}

/// `X̂_j = ⟨X, φ_j⟩_{L²}` for a step signal on the spectrum's partition.
pub fn wft_with(spectrum: &SignedSpectrum, x: &StepSignal) -> Result<FourierCoefficients> {
    let n = match spectrum.domain {
        Domain::Graphon { blocks } => blocks,
        Domain::Graph { .. } => {
            return Err(Error::InvalidParameter(
                "WFT needs a graphon spectrum".into(),
            ));
        }
    };
    if x.blocks() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x.blocks(),
        });
    }
    Ok(project(spectrum, x.values(), 1.0 / n as f64))
}

/// Exact graphon Fourier transform of a step signal on a step graphon.
pub fn wft_step(w: &StepGraphon, x: &StepSignal) -> Result<(SignedSpectrum, FourierCoefficients)> {
    if w.blocks() != x.blocks() {
        return Err(Error::DimensionMismatch {
            expected: w.blocks(),
            actual: x.blocks(),
        });
    }
    let spectrum = step_spectrum(w)?;
    let coeffs = wft_with(&spectrum, x)?;
    Ok((spectrum, coeffs))
}

/// Graphon Fourier transform of an analytic pair through midpoint discretization on `n` blocks.
///
/// Only the `n` discretized indices are reported; the kernel approximation error is `O(1/n)`
/// for Lipschitz kernels.
pub fn wft_numeric(
    w: &AnalyticKernel,
    x: &AnalyticSignal,
    n: usize,
) -> Result<(SignedSpectrum, FourierCoefficients)> {
    wft_step(&w.discretize(n)?, &x.discretize(n)?)
}

/// Inverse graphon Fourier transform, evaluated blockwise.
pub fn iwft(spectrum: &SignedSpectrum, c: &FourierCoefficients) -> Result<StepSignal> {
    if !matches!(spectrum.domain, Domain::Graphon { .. }) {
        return Err(Error::InvalidParameter(
            "iWFT needs a graphon spectrum".into(),
        ));
    }
    StepSignal::new(synthesize(spectrum, c)?)
}

fn check_cutoff(cutoff: f64) -> Result<()> {
    if cutoff > 0.0 && cutoff < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "cutoff must lie in (0, 1), got {cutoff}"
        )))
    }
}

/// Zeroes every coefficient whose eigenvalue satisfies `|σ_j| < cutoff`.
pub fn bandlimit(c: &FourierCoefficients, cutoff: f64) -> Result<FourierCoefficients> {
    check_cutoff(cutoff)?;
    let mut out = c.clone();
    for coef in &mut out.coefficients {
        if coef.sigma.abs() < cutoff {
            coef.value = 0.0;
        }
    }
    Ok(out)
}

pub fn is_bandlimited(c: &FourierCoefficients, cutoff: f64) -> Result<bool> {
    check_cutoff(cutoff)?;
    Ok(c.coefficients
        .iter()
        .filter(|coef| coef.sigma.abs() < cutoff)
        .all(|coef| coef.value.abs() <= BANDLIMIT_TOLERANCE))
}

/// `(T_W X)(v) = ∫ W(u, v) X(u) du` on the uniform `n`-partition.
///
/// Exact when `w` and `x` are step functions on `n` blocks; otherwise both are
/// midpoint-discretized first.
pub fn graphon_shift(w: &Graphon, x: &GraphonSignal, n: usize) -> Result<StepSignal> {
    let wd = w.discretize(n)?;
    let xd = x.discretize(n)?;
    let inv = 1.0 / n as f64;
    // values are symmetric, so row k doubles as column k
    let out = (0..n)
        .map(|k| dot(wd.values().row(k), xd.values()) * inv)
        .collect();
    StepSignal::new(out)
}

/// True when all nonzero eigenvalues are pairwise separated by more than `tol`.
pub fn is_non_derogatory(spectrum: &SignedSpectrum, tol: f64) -> bool {
    let mut nonzero: Vec<f64> = spectrum.sigmas().filter(|&s| s != 0.0).collect();
    nonzero.sort_by(f64::total_cmp);
    nonzero.windows(2).all(|w| w[1] - w[0] > tol)
}

/// Operator-norm distance between the orthogonal projections onto
/// `span{φ_j : j ∈ indices}` of two spectra, compared as step functions in L².
///
/// Block counts must divide one another; the coarser side is refined by replication.
pub fn spectral_projection_distance(
    a: &SignedSpectrum,
    b: &SignedSpectrum,
    indices: &[SignedIndex],
) -> Result<f64> {
    let (na, nb) = (a.domain.size(), b.domain.size());
    if na.max(nb) % na.min(nb) != 0 {
        return Err(Error::Incommensurable { a: na, b: nb });
    }
    let m = na.max(nb);
    let basis = |s: &SignedSpectrum| -> Result<Vec<Vec<f64>>> {
        let factor = m / s.domain.size();
        let norm = (m as f64).sqrt();
        indices
            .iter()
            .map(|&j| {
                let comp = s
                    .get(j)
                    .ok_or_else(|| Error::InvalidParameter(format!("index {j} not in spectrum")))?;
                Ok(s.step_values(comp)
                    .iter()
                    .flat_map(|&v| std::iter::repeat_n(v / norm, factor))
                    .collect())
            })
            .collect()
    };
    let ba = basis(a)?;
    let bb = basis(b)?;
    if ba.is_empty() {
        return Ok(0.0);
    }
    // ‖P_a - P_b‖ = max(‖(I - P_b) P_a‖, ‖(I - P_a) P_b‖). Residuals are formed
    // explicitly so that small distances keep full precision.
    let p = ba.len();
    let defect = |from: &[Vec<f64>], onto: &[Vec<f64>]| -> Result<f64> {
        let residuals: Vec<Vec<f64>> = from
            .iter()
            .map(|a| {
                let mut r = a.clone();
                for b in onto {
                    axpy(-dot(a, b), b, &mut r);
                }
                r
            })
            .collect();
        let gram = Matrix::from_fn(p, p, |i, k| dot(&residuals[i], &residuals[k]));
        let top = crate::linalg::symmetric_eigenvalues(&gram)?
            .last()
            .copied()
            .unwrap_or(0.0);
        Ok(top.max(0.0).sqrt().min(1.0))
    };
    Ok(defect(&ba, &bb)?.max(defect(&bb, &ba)?))
}

/// Eigenvalue and coefficient magnitude per signed index, computed without eigenvectors.
///
/// Magnitudes are sign-independent, so they match `|gft|` / `|wft|` while costing a
/// fraction of a full decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMagnitudes {
    pub domain: Domain,
    pub entries: Vec<Coefficient>,
}

impl CoefficientMagnitudes {
    fn from_projection(
        domain: Domain,
        values: &[f64],
        coeffs: &[f64],
        sigma_divisor: f64,
        coeff_scale: f64,
    ) -> Self {
        let entries = signed_order(values)
            .into_iter()
            .map(|(index, pos, sigma)| Coefficient {
                index,
                sigma: sigma / sigma_divisor,
                value: coeffs[pos].abs() * coeff_scale,
            })
            .collect();
        Self { domain, entries }
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.entries.iter().map(|c| c.value).collect()
    }

    /// Entries ordered by descending `|σ|` (ties by ascending `j`).
    pub fn by_spectral_magnitude(&self) -> Vec<Coefficient> {
        FourierCoefficients {
            domain: self.domain,
            coefficients: self.entries.clone(),
        }
        .sorted_rows()
    }
}

pub fn gft_magnitudes(g: &Graph, x: &GraphSignal) -> Result<CoefficientMagnitudes> {
    let (values, coeffs) = eigen_projection(g.weights(), x.values())?;
    Ok(CoefficientMagnitudes::from_projection(
        Domain::Graph { n: g.n() },
        &values,
        &coeffs,
        1.0,
        1.0,
    ))
}

pub fn wft_magnitudes(w: &StepGraphon, x: &StepSignal) -> Result<CoefficientMagnitudes> {
    let (values, coeffs) = eigen_projection(w.values(), x.values())?;
    let n = w.blocks() as f64;
    Ok(CoefficientMagnitudes::from_projection(
        Domain::Graphon { blocks: w.blocks() },
        &values,
        &coeffs,
        n,
        1.0 / n.sqrt(),
    ))
}
