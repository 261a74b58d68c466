//! Graphons and graphon signals.
//!
//! A graphon is either an analytic kernel evaluated pointwise or a step
//! function over the uniform partition `I_k = [(k-1)/N, k/N)` (the last
//! interval closed at 1). Step graphons are what a graph induces and what
//! analytic kernels are discretized into before any spectral work.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSignal};
use crate::linalg::Matrix;

/// Value range of a kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelRange {
    pub lo: f64,
    pub hi: f64,
}

impl KernelRange {
    pub const UNIT: KernelRange = KernelRange { lo: 0.0, hi: 1.0 };
    pub const SIGNED: KernelRange = KernelRange { lo: -1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidParameter(format!(
                "bad kernel range [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }

    /// True when every value in the range is a valid edge probability.
    pub fn is_probability(&self) -> bool {
        self.lo >= 0.0 && self.hi <= 1.0
    }
}

/// Block containing `u` in the uniform `n`-partition of `[0, 1]`.
pub fn block_index(u: f64, n: usize) -> usize {
    ((u * n as f64) as usize).min(n - 1)
}

/// Midpoint `(k + 1/2) / n` of block `k` (0-based).
pub fn block_midpoint(k: usize, n: usize) -> f64 {
    (k as f64 + 0.5) / n as f64
}

fn check_unit(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::ArgumentOutsideUnitInterval(u))
    }
}

pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SignalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Built-in parametric kernel families plus user-supplied closures.
#[derive(Clone)]
pub enum AnalyticKernel {
    /// `W(u, v) = p`
    Constant(f64),
    /// `W(u, v) = u v`
    Product,
    /// `W(u, v) = exp(-beta |u - v|)`, the soft random geometric kernel on a line.
    SoftGeometric { beta: f64 },
    /// A symmetric closure; the caller vouches for symmetry and the stated range.
    Custom {
        name: String,
        range: KernelRange,
        f: KernelFn,
    },
}

impl AnalyticKernel {
    pub fn constant(p: f64) -> Result<Self> {
        if !KernelRange::SIGNED.contains(p) {
            return Err(Error::OutOfRange {
                value: p,
                lo: -1.0,
                hi: 1.0,
            });
        }
        Ok(Self::Constant(p))
    }

    pub fn soft_geometric(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(Self::SoftGeometric { beta })
    }

    pub fn custom(
        name: impl Into<String>,
        range: KernelRange,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom {
            name: name.into(),
            range,
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Constant(p) => format!("constant({p})"),
            Self::Product => "product".into(),
            Self::SoftGeometric { beta } => format!("soft-geometric({beta})"),
            Self::Custom { name, .. } => name.clone(),
        }
    }

    pub fn range(&self) -> KernelRange {
        match self {
            Self::Constant(p) => KernelRange {
                lo: p.min(0.0),
                hi: p.max(0.0),
            },
            Self::Product | Self::SoftGeometric { .. } => KernelRange::UNIT,
            Self::Custom { range, .. } => *range,
        }
    }

    /// Unchecked evaluation; `u` and `v` are assumed to lie in `[0, 1]`.
    pub fn value(&self, u: f64, v: f64) -> f64 {
        match self {
            Self::Constant(p) => *p,
            Self::Product => u * v,
            Self::SoftGeometric { beta } => (-beta * (u - v).abs()).exp(),
            Self::Custom { f, .. } => f(u, v),
        }
    }

    /// Midpoint discretization onto `n` blocks: `values[j][k] = W(m_j, m_k)`.
    pub fn discretize(&self, n: usize) -> Result<StepGraphon> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "resolution must be at least 1".into(),
            ));
        }
        let mut values = Matrix::zeros(n, n);
        for j in 0..n {
            let mj = block_midpoint(j, n);
            for k in j..n {
                let w = self.value(mj, block_midpoint(k, n));
                values[(j, k)] = w;
                values[(k, j)] = w;
            }
        }
        let range = self.range();
        StepGraphon::new(values, KernelRange::new(range.lo, range.hi)?)
    }
}

impl fmt::Debug for AnalyticKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Symmetric step kernel over the uniform `N`-partition.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGraphon {
    values: Matrix,
    range: KernelRange,
}

impl StepGraphon {
    /// Validates exact symmetry and that every entry lies in `range`.
    pub fn new(values: Matrix, range: KernelRange) -> Result<Self> {
        if !values.is_square() || values.rows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "step graphon needs a non-empty square matrix, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        let asymmetry = values.asymmetry();
        if asymmetry != 0.0 {
            return Err(Error::NotSymmetric { asymmetry });
        }
        if let Some(&bad) = values.as_slice().iter().find(|x| !range.contains(**x)) {
            return Err(Error::OutOfRange {
                value: bad,
                lo: range.lo,
                hi: range.hi,
            });
        }
        Ok(Self { values, range })
    }

    /// `W_G(u, v) = [S]_{jk}` for `u ∈ I_j`, `v ∈ I_k`.
    pub fn induced(g: &Graph) -> Self {
        let values = g.shift_operator().into_matrix();
        let (lo, hi) = values
            .as_slice()
            .iter()
            .fold((0.0f64, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let range = if KernelRange::SIGNED.contains(lo) && KernelRange::SIGNED.contains(hi) {
            if lo >= 0.0 {
                KernelRange::UNIT
            } else {
                KernelRange::SIGNED
            }
        } else {
            KernelRange { lo, hi }
        };
        Self { values, range }
    }

    pub fn blocks(&self) -> usize {
        self.values.rows()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn range(&self) -> KernelRange {
        self.range
    }

    /// Block lookup without argument checks.
    pub fn value(&self, u: f64, v: f64) -> f64 {
        let n = self.blocks();
        self.values[(block_index(u, n), block_index(v, n))]
    }

    /// True when the stored values are all in `[0, 1]` (a proper graphon).
    pub fn is_nonnegative_unit(&self) -> bool {
        self.values
            .as_slice()
            .iter()
            .all(|x| (0.0..=1.0).contains(x))
    }
}

#[derive(Clone, Debug)]
pub enum Graphon {
    Analytic(AnalyticKernel),
    Step(StepGraphon),
}

impl Graphon {
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        check_unit(u)?;
        check_unit(v)?;
        Ok(self.value(u, v))
    }

    pub fn value(&self, u: f64, v: f64) -> f64 {
        match self {
            Self::Analytic(k) => k.value(u, v),
            Self::Step(s) => s.value(u, v),
        }
    }

    pub fn range(&self) -> KernelRange {
        match self {
            Self::Analytic(k) => k.range(),
            Self::Step(s) => s.range(),
        }
    }

    /// Midpoint discretization; reproduces a step graphon exactly when `n` is a multiple of its block count.
    pub fn discretize(&self, n: usize) -> Result<StepGraphon> {
        match self {
            Self::Analytic(k) => k.discretize(n),
            Self::Step(s) if s.blocks() == n => Ok(s.clone()),
            Self::Step(s) => {
                if n == 0 {
                    return Err(Error::InvalidParameter(
                        "resolution must be at least 1".into(),
                    ));
                }
                let values = Matrix::from_fn(n, n, |j, k| {
                    s.value(block_midpoint(j, n), block_midpoint(k, n))
                });
                StepGraphon::new(values, s.range())
            }
        }
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            Self::Analytic(AnalyticKernel::Constant(p)) => Some(*p),
            _ => None,
        }
    }
}

impl From<AnalyticKernel> for Graphon {
    fn from(k: AnalyticKernel) -> Self {
        Self::Analytic(k)
    }
}

impl From<StepGraphon> for Graphon {
    fn from(s: StepGraphon) -> Self {
        Self::Step(s)
    }
}

#[derive(Clone)]
pub enum AnalyticSignal {
    /// `X(u) = c`
    Constant(f64),
    /// `X(u) = u`
    Identity,
    /// `X(u) = exp(-u² / (2 sigma²))`, a cross-wind Gaussian plume profile with its source at 0.
    Gaussian {
        sigma: f64,
    },
    Custom {
        name: String,
        f: SignalFn,
    },
}

impl AnalyticSignal {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self::Gaussian { sigma })
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Constant(c) => format!("constant({c})"),
            Self::Identity => "identity".into(),
            Self::Gaussian { sigma } => format!("gaussian({sigma})"),
            Self::Custom { name, .. } => name.clone(),
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Identity => u,
            Self::Gaussian { sigma } => (-u * u / (2.0 * sigma * sigma)).exp(),
            Self::Custom { f, .. } => f(u),
        }
    }

    pub fn discretize(&self, n: usize) -> Result<StepSignal> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "resolution must be at least 1".into(),
            ));
        }
        StepSignal::new((0..n).map(|k| self.value(block_midpoint(k, n))).collect())
    }
}

impl fmt::Debug for AnalyticSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Piecewise-constant signal over the uniform `N`-partition.
#[derive(Clone, Debug, PartialEq)]
pub struct StepSignal {
    values: Vec<f64>,
}

impl StepSignal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "step signal needs at least one block".into(),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("step signal block {i}")));
        }
        Ok(Self { values })
    }

    /// `X_G(v) = [x]_k` for `v ∈ I_k`.
    pub fn induced(x: &GraphSignal) -> Result<Self> {
        Self::new(x.values().to_vec())
    }

    pub fn blocks(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, u: f64) -> f64 {
        self.values[block_index(u, self.blocks())]
    }

    /// L² norm on `[0, 1]`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|x| x * x).sum::<f64>() / self.blocks() as f64).sqrt()
    }
}

#[derive(Clone, Debug)]
pub enum GraphonSignal {
    Analytic(AnalyticSignal),
    Step(StepSignal),
}

impl GraphonSignal {
    pub fn eval(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.value(u))
    }

    pub fn value(&self, u: f64) -> f64 {
        match self {
            Self::Analytic(s) => s.value(u),
            Self::Step(s) => s.value(u),
        }
    }

    pub fn discretize(&self, n: usize) -> Result<StepSignal> {
        match self {
            Self::Analytic(s) => s.discretize(n),
            Self::Step(s) if s.blocks() == n => Ok(s.clone()),
            Self::Step(s) => {
                if n == 0 {
                    return Err(Error::InvalidParameter(
                        "resolution must be at least 1".into(),
                    ));
                }
                StepSignal::new((0..n).map(|k| s.value(block_midpoint(k, n))).collect())
            }
        }
    }
}

impl From<AnalyticSignal> for GraphonSignal {
    fn from(s: AnalyticSignal) -> Self {
        Self::Analytic(s)
    }
}

impl From<StepSignal> for GraphonSignal {
    fn from(s: StepSignal) -> Self {
        Self::Step(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn analytic_evaluation() {
        let c: Graphon = AnalyticKernel::constant(0.5).unwrap().into();
        assert_eq!(c.eval(0.1, 0.9).unwrap(), 0.5);
        let p: Graphon = AnalyticKernel::Product.into();
        assert_eq!(p.eval(0.5, 0.4).unwrap(), 0.2);
        assert!(matches!(
            p.eval(1.5, 0.0),
            Err(Error::ArgumentOutsideUnitInterval(_))
        ));
        assert!(p.eval(0.0, -0.1).is_err());
    }

    #[test]
    fn step_lookup_uses_right_open_blocks() {
        let s = StepGraphon::new(
            Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap(),
            KernelRange::UNIT,
        )
        .unwrap();
        let w = Graphon::Step(s);
        assert_eq!(w.eval(0.25, 0.75).unwrap(), 1.0);
        assert_eq!(w.eval(0.5, 0.75).unwrap(), 0.0);
        assert_eq!(w.eval(0.49, 0.5).unwrap(), 1.0);
        assert_eq!(w.eval(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(w.eval(0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn induced_graphon_and_signal() {
        let k2 = Graph::new(2, &[(0, 1, 1.0)]).unwrap();
        let w = StepGraphon::induced(&k2);
        assert_eq!(w.values().to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let empty = StepGraphon::induced(&Graph::new(3, &[]).unwrap());
        assert_eq!(empty.values(), &Matrix::zeros(3, 3));
        let half = StepGraphon::induced(&Graph::new(2, &[(0, 1, 0.5)]).unwrap());
        assert_eq!(half.values()[(0, 1)], 0.5);

        let x = GraphSignal::new(vec![3.0, -1.0, 4.0]).unwrap();
        assert_eq!(StepSignal::induced(&x).unwrap().values(), &[3.0, -1.0, 4.0]);
        let z = GraphSignal::zeros(2);
        assert_eq!(StepSignal::induced(&z).unwrap().values(), &[0.0, 0.0]);
    }

    #[test]
    fn step_graphon_validation() {
        let one =
            StepGraphon::new(Matrix::from_rows(&[[0.5]]).unwrap(), KernelRange::UNIT).unwrap();
        assert_eq!(one.value(0.3, 0.9), 0.5);
        let diag = Matrix::from_rows(&[[0.5, 0.0], [0.0, 0.5]]).unwrap();
        assert!(StepGraphon::new(diag, KernelRange::UNIT).is_ok());
        let signed = Matrix::from_rows(&[[0.5, -0.5], [-0.5, 0.5]]).unwrap();
        assert!(StepGraphon::new(signed.clone(), KernelRange::UNIT).is_err());
        assert!(StepGraphon::new(signed, KernelRange::SIGNED).is_ok());
        let asym = Matrix::from_rows(&[[0.0, 0.2], [0.3, 0.0]]).unwrap();
        assert!(matches!(
            StepGraphon::new(asym, KernelRange::UNIT),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn midpoint_discretization() {
        let c = AnalyticKernel::constant(0.5)
            .unwrap()
            .discretize(4)
            .unwrap();
        assert!(c.values().as_slice().iter().all(|&x| x == 0.5));
        let p = AnalyticKernel::Product.discretize(2).unwrap();
        assert_eq!(
            p.values().to_rows(),
            vec![vec![1.0 / 16.0, 3.0 / 16.0], vec![3.0 / 16.0, 9.0 / 16.0]]
        );
        let x = AnalyticSignal::Identity.discretize(2).unwrap();
        assert_eq!(x.values(), &[0.25, 0.75]);
    }

    #[test]
    fn refining_a_step_graphon_is_exact() {
        let s = StepGraphon::new(
            Matrix::from_rows(&[[0.1, 0.7], [0.7, 0.3]]).unwrap(),
            KernelRange::UNIT,
        )
        .unwrap();
        let fine = Graphon::Step(s.clone()).discretize(6).unwrap();
        for j in 0..6 {
            for k in 0..6 {
                assert_eq!(fine.values()[(j, k)], s.values()[(j / 3, k / 3)]);
            }
        }
    }

    #[test]
    fn gaussian_signal() {
        let s = AnalyticSignal::gaussian(0.5).unwrap();
        assert_eq!(s.value(0.0), 1.0);
        assert!((s.value(0.5) - (-0.5f64).exp()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn discretization_is_exactly_symmetric(beta in 0.1f64..20.0, n in 1usize..40) {
            let custom = AnalyticKernel::custom("skew-eval", KernelRange::UNIT, move |u, v| {
                // deliberately order-sensitive arithmetic
                ((u * 3.1 + v * 0.7).sin() + (v * 3.1 + u * 0.7).sin()).abs() / 2.0
            });
            for k in [AnalyticKernel::soft_geometric(beta).unwrap(), custom] {
                let d = k.discretize(n).unwrap();
                prop_assert_eq!(d.values().asymmetry(), 0.0);
            }
        }

        #[test]
        fn step_eval_constant_on_blocks(n in 1usize..12, j in 0usize..12, k in 0usize..12,
                                        a in 0.01f64..0.99, b in 0.01f64..0.99) {
            let (j, k) = (j % n, k % n);
            let values = Matrix::from_fn(n, n, |r, c| ((r * 7 + c * 7 + r * c) % 10) as f64 / 10.0);
            let w = StepGraphon::new(values, KernelRange::UNIT).unwrap();
            let at = |t: f64, blk: usize| (blk as f64 + t) / n as f64;
            prop_assert_eq!(w.value(at(a, j), at(b, k)), w.value(at(b, j), at(a, k)));
            prop_assert_eq!(w.value(at(a, j), at(b, k)), w.values()[(j, k)]);
        }
    }
}
