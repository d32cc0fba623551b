//! Curvature tomography with smeared, delta-coupled particle detectors.
//!
//! A detector with an ellipsoidal Gaussian smearing profile, switched on for
//! an instant, is excited with a probability that depends on the local
//! curvature and on the field state. Expanding that probability to leading
//! order in curvature gives a linear system whose coefficients depend only on
//! the detector shape. Measuring enough differently shaped detectors, in
//! enough boosted frames, recovers the Riemann tensor at a point.
//!
//! Layout:
//! - [`special`]: Carlson and Legendre elliptic integrals, digamma.
//! - [`oracle`]: independent quadrature and Monte Carlo evaluation of the
//!   smearing integrals.
//! - [`coefficients`]: shape coefficients behind pluggable engines.
//! - [`geometry`]: Riemann tensors in Fermi frames, catalog spacetimes, boosts.
//! - [`forward`]: excitation probability expansion.
//! - [`tomography`]: experiment design and weighted least-squares recovery.
//! - [`measurement`]: seeded finite-shot campaigns.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod coefficients;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod measurement;
pub mod oracle;
pub mod quadrature;
pub mod registry;
pub mod serde_matrix;
pub mod shape;
pub mod special;
pub mod tomography;
pub mod validation;

pub use coefficients::{CoefficientEngine, CoefficientSet, Provenance};
pub use error::{Error, Result};
pub use geometry::{BoostSpec, Catalog, CurvaturePoint, RiemannTensor};
pub use oracle::{KernelKind, OracleConfig};
pub use registry::Registry;
pub use shape::DetectorShape;
pub use tomography::{ExperimentDesign, RecoveryResult};
