//! Spectral toolkit for the radial nonlinear wave equation `□f + |f|^α f = 0`
//! on R³, posed on the Einstein cylinder through the Penrose transform.
//!
//! The crate is `no_std` and only needs `alloc`. Modules:
//!
//! - [`spectral`]: zonal basis on S³, fast transforms, multipliers, norms.
//! - [`penrose`]: Minkowski ↔ cylinder chart, conformal factor, data maps.
//! - [`rng`] and [`measures`]: reproducible Gaussian sampling and Monte Carlo
//!   estimators for the Gaussian and Gibbs-type measures.
//! - [`dynamics`]: truncated Galerkin flow, energy ledger, Picard solver,
//!   space-time norms and scattering data.
//! - [`diagnostics`]: ensemble statistics and log-log fits.
#![no_std]
// `!(x > y)` is how NaN inputs are rejected throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod dynamics;
pub mod ensemble;
pub mod fft;
pub mod measures;
pub mod penrose;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use num_complex::Complex64;
