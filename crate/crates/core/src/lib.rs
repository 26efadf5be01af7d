//! Void-cell probability, coverage, throughput and optimal cell load for
//! small-cell networks with generalized cell association.
//!
//! The analytical side lives in [`channel`], [`analytics`], [`powergreen`] and
//! [`optimizer`]. The Monte Carlo side lives in [`geomsim`]. The
//! [`validation`] module pairs the two into named pass/fail checks.

pub mod analytics;
pub mod channel;
pub mod error;
pub mod geomsim;
pub mod integrate;
pub mod optimizer;
pub mod powergreen;
pub mod preset;
pub mod validation;

pub use error::{Error, Result};
