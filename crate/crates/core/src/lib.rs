//! Data augmentation Gibbs sampling for Bayesian lasso posteriors.
//!
//! The crate covers probit, logistic and heteroskedastic-Gaussian
//! (Laplace-error) likelihoods with Laplace priors on the slopes and a
//! Gaussian prior on the intercept. Alongside the sampler it computes
//! non-asymptotic convergence certificates (coupling constants, density
//! ratio bound, contraction rate, warm-start warmness, mixing-time budget)
//! and validates chains against a brute-force quadrature posterior on
//! two-dimensional instances.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod format;
pub mod io;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod pipeline;
pub mod sampler;
pub mod synthetic;

pub use bounds::{BoundReport, WarmStart};
pub use diagnostics::DiagnosticsReport;
pub use error::{Error, Result};
pub use linalg::{DesignMatrix, PrecisionGaussian, ScaledDesign};
pub use models::{Dataset, HyperParams, LatentVector, ModelKind, SmoothnessCertificate};
pub use oracle::OracleGrid;
pub use sampler::{ChainState, InitialDistribution, RandomStream, SampleStore, SamplerConfig};
