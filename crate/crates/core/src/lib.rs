//! Boundary-element solver for the fractional Dirichlet problem
//! `-(-Δ)^α u = f` in `Ω`, `u = g` on `∂Ω`.
//!
//! The solution is split into a homogeneous part computed spectrally on the
//! unit square ([`spectral`]) and a fractional-harmonic part represented as a
//! single-layer Riesz potential `u₂ = S_α G` whose density solves
//! `γ S_α G = g` ([`bem`]). The [`oracle`] module holds independent checks:
//! a truncated hypersingular quadrature of `-(-Δ)^α`, Fourier-symbol decay of
//! the truncated kernel, and far-field decay tables.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Published coefficient tables are kept digit for digit.
#![allow(clippy::excessive_precision)]

pub mod bem;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod spectral;
pub mod specfun;

pub use error::{Error, Result};
pub use specfun::{FracOrder, KernelConstants};
