//! Pseudo-spectral laboratory for the 3D hyperviscous Navier–Stokes
//! equations on the unit torus driven by Kraichnan-type transport noise.
//!
//! The crate is organised in four layers:
//!
//! * [`spectral`]: Fourier coefficients of periodic vector fields, Leray
//!   projection, fractional Laplacian, norms and the FFT pipeline;
//! * [`noise`]: lattice partition and frames, shell spectra `θⁿ`,
//!   counter-addressed Brownian increments, the transport operator and the
//!   Itô–Stratonovich corrector;
//! * [`dynamics`]: time integration of the deterministic, stochastic and
//!   cut-off systems together with the diagnostics they record;
//! * [`experiments`]: reproducible scenario runners, result tables and the
//!   command line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod noise;
pub mod spectral;

pub use error::{Error, Result};
