//! Numerical laboratory for two-party quantum protocols computing classical
//! functions: finite-dimensional state/channel numerics, protocol execution
//! (honest, purified, adversarial), cheating-isometry construction, zero-sum
//! game machinery, and a fixture catalog with bound-check pipelines.

pub mod attack;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod proto;
pub mod qcore;
pub mod report;
pub mod scenarios;

pub use error::{Error, Result};

/// Validation tolerance for state/channel invariants (norms, trace, isometry).
pub const TOL_VALIDATE: f64 = 1e-9;

/// Tolerance for derived equalities between independently computed quantities.
pub const TOL_DERIVED: f64 = 1e-8;
