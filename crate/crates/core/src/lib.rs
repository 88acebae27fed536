//! Detection statistics of decomposable entanglement witnesses on random
//! bipartite quantum states.
//!
//! The crate is split into:
//!
//! - [`qstate`]: bipartite pure and mixed states, Haar sampling, Schmidt
//!   decomposition, partial trace and partial transpose, entropies.
//! - [`witness`]: witnesses of the form `W = P + Q^{T_B}` and the rescaled
//!   expectation statistic `w = N·N'·tr(Wρ)`.
//! - [`analytic`]: closed-form densities and tail probabilities together with
//!   the special functions and quadrature they need.
//! - [`stats`]: histograms, cumulant estimators with jackknife errors and
//!   Kolmogorov–Smirnov distances.
//! - [`ensemble`]: seeded, worker-count independent Monte Carlo ensembles and
//!   parameter scans.

pub mod analytic;
pub mod ensemble;
mod error;
pub mod linalg;
pub mod qstate;
pub mod stats;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{CMat, Spectrum, C64};
pub use qstate::{BipartiteDims, MixedState, PureState, SchmidtDecomposition};
pub use witness::{Witness, WitnessSample};
