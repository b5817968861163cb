//! Taylorlet analysis of edge-type singularities.
//!
//! The crate is split into three layers:
//!
//! * [`symbolic`] builds analyzing Taylorlets `tau = g (x) h` exactly, with
//!   rational coefficients, and checks their higher-order vanishing moments
//!   and restrictiveness.
//! * [`transform`] evaluates the Taylorlet transform of feasible scenes
//!   (sums of iterated integrals of Dirac graphs) through a one-dimensional
//!   reduction and adaptive Gauss-Kronrod quadrature.
//! * [`analysis`] turns transform values into scale-space grids, tracks
//!   modulus maxima across scales, fits decay exponents and runs the
//!   sequential Taylor-coefficient detection.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod quadrature;
pub mod symbolic;
pub mod transform;

pub use error::{Error, Result};
