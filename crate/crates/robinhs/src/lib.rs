//! Numerical toolkit for half-space Robin Laplacians via boundary
//! reduction.
//!
//! The operator is -Delta on the half-space over R^n with the boundary
//! condition d_nu f = alpha f. Resolvent differences between two such
//! operators reduce, through a Krein-type formula, to dense operators on
//! the boundary alone; this crate builds those boundary operators on a
//! periodic lattice, measures the Schatten-von Neumann decay of their
//! singular values, hunts discrete eigenvalues through the
//! Birman-Schwinger characteristic, and cross-validates everything
//! against a brute-force finite-difference model on a truncated strip.
//!
//! Modules:
//!
//! * [`grid`]: periodic boundary lattice, Fourier calculus, dense
//!   materialization of multiplier and pointwise operators.
//! * [`halfspace`]: Weyl multiplier, Gram factor, boundary-reduced
//!   resolvent difference, Cwikel factor, Birman-Schwinger eigenvalue
//!   search, spectral enclosure sums.
//! * [`schatten`]: singular values, Schatten norms, weak quasinorms,
//!   decay-exponent fits and class verdicts.
//! * [`oracle`]: finite-difference Robin Laplacian on a strip, direct
//!   resolvents and resolvent-difference spectra, Krein-formula
//!   cross-validation, Green identity and fiber bound-state checks.
//!
//! All types are generic over the scalar ([`scalar::Real`], implemented
//! for `f32` and `f64`); the `*64` aliases below fix the common choice.

pub mod error;
pub mod grid;
pub mod halfspace;
pub mod oracle;
pub mod scalar;
pub mod schatten;

pub use error::{Error, Result};

pub type BoundaryGrid64 = grid::BoundaryGrid<f64>;
pub type GridFunction64 = grid::GridFunction<f64>;
pub type CoefficientSpec64 = grid::CoefficientSpec<f64>;
pub type FourierMultiplier64 = grid::FourierMultiplier<f64>;
pub type BoundaryOperator64 = grid::BoundaryOperator<f64>;
pub type SpectralParameter64 = halfspace::SpectralParameter<f64>;
pub type EigenvalueRecord64 = halfspace::EigenvalueRecord<f64>;
pub type SingularSpectrum64 = schatten::SingularSpectrum<f64>;
pub type DecayFit64 = schatten::DecayFit<f64>;
pub type ClassVerdict64 = schatten::ClassVerdict<f64>;
pub type StripGrid64 = oracle::StripGrid<f64>;
pub type StripFunction64 = oracle::StripFunction<f64>;
pub type SparseOperator64 = oracle::SparseOperator<f64>;
