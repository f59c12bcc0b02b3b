//! Experiment runner for the boundary-reduction toolkit.
//!
//! Binds the `robinhs` library operations into seven runnable
//! scenarios (S1 through S7), each checking one cluster of claims
//! about half-space Robin Laplacians: Weyl-function exactness, the
//! Krein resolvent formula against a finite-difference oracle,
//! singular-value decay and Schatten-class membership of boundary
//! resolvent differences, non-compactness witnesses, and complex
//! eigenvalue hunting with enclosure sums.
//!
//! A scenario consumes an [`config::ExperimentConfig`] (JSON, with
//! built-in defaults per scenario), runs deterministically for a fixed
//! seed, and emits a [`report::RunReport`] as JSON plus CSV files for
//! plottable arrays. [`claims::registry`] maps every verified claim to
//! the scenario or named check that covers it.

pub mod claims;
pub mod config;
pub mod report;
pub mod scenarios;
