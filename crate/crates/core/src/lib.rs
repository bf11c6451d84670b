//! Numerical laboratory for the Fourier algebra `A(G)` of a finite group.
//!
//! The crate covers finite-group arithmetic, the Fourier transform and the
//! module actions of `VN(G)` on `A(G)`, polar/canonical decompositions, a
//! functional calculus for right convolutions, projections onto spans of
//! translates, residual certificates for spectral synthesis and the
//! constructive union procedures for strongly spectral sets.

pub mod calculus;
pub mod canonical;
pub mod dense;
pub mod error;
mod fft;
pub mod group;
pub mod projector;
pub mod random;
pub mod scenarios;
pub mod synthesis;
pub mod transform;
pub mod union;

pub use error::{Error, Result};
pub use group::{GFunction, Group, GroupSpec};
pub use num_complex::Complex64;
