//! Numerical certification of plurisubharmonic counterexample constructions.
//!
//! The crate builds two pseudoconvex sublevel domains in `C^n` together with
//! their witness plurisubharmonic functions and checks every construction-side
//! property by sampling:
//!
//! - [`geometry`]: points of `C x C^{n-1}`, regions, deterministic samplers and
//!   the golden-ratio angle sequence used for the pole positions.
//! - [`logpoles`]: pole schedules and the logarithmic potential
//!   `sigma(z) = sum_j delta_j log|z - a_j|` with certified truncation bounds.
//! - [`calculus`]: finite-difference Levi forms, Hermitian eigenvalues,
//!   circle-mean tests and plurisubharmonicity certificates.
//! - [`constructions`]: the concrete domains, cutoffs and witness functions.
//! - [`certify`]: named suites, reports, grid exports and the CLI plumbing.
//!
//! The differential and geometric layers are generic over the floating-point
//! type ([`Scalar`]); the constructions are calibrated in double precision and
//! use the `f64` aliases below.

pub mod calculus;
pub mod certify;
pub mod constructions;
pub mod geometry;
pub mod logpoles;
pub mod scalar;

pub use scalar::Scalar;

/// Double-precision point of `C x C^{n-1}`.
pub type Point = geometry::CPoint<f64>;
/// Double-precision region.
pub type Region = geometry::Region<f64>;
/// Double-precision Levi-form sample.
pub type LeviSample = calculus::HermitianSample<f64>;
/// Double-precision Hermitian matrix.
pub type Hermitian = calculus::HermitianMatrix<f64>;
/// Double-precision finite-difference stencil.
pub type Stencil = calculus::Stencil<f64>;

pub use calculus::{Certificate, Status};
pub use logpoles::{CertifiedValue, PoleSchedule, Variant};
