//! Signal processing on graphs and graphons: graph and graphon Fourier transforms,
//! W-random sampling, homomorphism densities, the cut norm, and the experiments
//! that compare graph spectra against their graphon limits.

pub mod error;
pub mod experiments;
pub mod graph;
pub mod graphon;
pub mod homomorphism;
pub mod io;
pub mod linalg;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Graph, GraphSignal, Permutation, Rating, RatingTable, ShiftOperator};
pub use graphon::{
    AnalyticKernel, AnalyticSignal, Graphon, GraphonSignal, KernelRange, StepGraphon, StepSignal,
};
pub use homomorphism::{CutNorm, MonteCarloEstimate, Motif, NormSandwich};
pub use linalg::{Matrix, SymmetricEigen};
pub use sampling::SampleLabels;
pub use spectral::{
    Coefficient, Domain, FourierCoefficients, SignedIndex, SignedSpectrum, SpectralComponent,
};
