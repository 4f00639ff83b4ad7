//! Keller-Segel chemotaxis on the Poincare disk.
//!
//! A numerical laboratory for the parabolic-elliptic chemotaxis system on
//! the 2-D hyperbolic disk:
//!
//! - [`geometry`]: exact disk geometry (distances, Moebius translations, the
//!   exponential weight p, radial Laplace-Beltrami operator);
//! - [`kernels`]: the Green function of -Delta_H, its gradient algebra, and
//!   kernel quadrature of the chemical potential;
//! - [`solver`]: mass-conserving, positivity-preserving radial finite-volume
//!   evolution with adaptive stepping and blow-up detection;
//! - [`functionals`]: mass, moments, entropy, Fisher information, free
//!   energy, L^q norms and trajectory seminorms;
//! - [`bounds`]: closed forms of the theory (blow-up threshold and time,
//!   virial and moment envelopes, entropy decay bounds);
//! - [`lab`]: a verification bench for the functional inequalities (HLS,
//!   both logarithmic HLS forms, Mugelli-Talenti, Beckner, relative
//!   entropy);
//! - [`config`] / [`cli`] / [`output`]: the experiment runner behind the
//!   `hyperks` binary.
//!
//! The `examples/` directory walks through each capability; the acceptance
//! suite in `tests/acceptance.rs` pins the quantitative claims.

// `!(x > 0)` is the NaN-rejecting validation idiom throughout; the Lanczos
// table carries its full published digits; index loops that walk several
// arrays in lockstep stay as indices.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod cli;
pub mod config;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod kernels;
pub mod lab;
pub mod output;
pub mod quad;
pub mod solver;

pub use error::{Error, Result};
