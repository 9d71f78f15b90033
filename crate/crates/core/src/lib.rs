//! Numerical laboratory for trajectory statistics of random energy
//! landscapes under the simple random walk on the hypercube, and for the
//! spectral properties of the associated transverse-field operators.
//!
//! The crate is organized around:
//!
//! - [`analytic`] — closed-form limit formulas: landscape pressure, the
//!   limiting trajectory SCGF, its rate function, phase classification and
//!   the transverse-field pressure.
//! - [`remfield`] — seed-keyed Gaussian landscapes with on-demand values
//!   and exact extreme statistics.
//! - [`operator`] — matrix-free symmetric operators on configuration space
//!   plus dense materialization for oracle use.
//! - [`spectral`] — Lanczos eigensolves, the Krylov semigroup action with
//!   logarithmic scaling, finite-size SCGF records, spectral-projector and
//!   level-shift statistics, boundary-vector checks.
//! - [`resolvent`] — conjugate-gradient resolvent solves and the
//!   deterministic ell^1 analysis.
//! - [`trajectories`] — continuous-time walk sampling, time-integrated
//!   energies, moment-generating-function and activity estimation.
//! - [`validation`] — the bundled end-to-end validation suite.

pub mod analytic;
mod chunks;
pub mod error;
pub mod operator;
pub mod remfield;
pub mod resolvent;
pub mod rng;
pub mod spectral;
pub mod trajectories;
pub mod validation;

pub use error::{Error, Result};
