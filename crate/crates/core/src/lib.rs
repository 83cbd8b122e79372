//! Solvers and a verification harness for the time-fractional Fokker-Planck
//! problem on a 1D interval.
//!
//! The crate is organised bottom-up:
//!
//! * [`fracops`] holds the fractional-calculus toolkit: the Riemann-Liouville
//!   integral `I^mu` and derivative of piecewise-polynomial trajectories, the
//!   Mittag-Leffler function, and the fractional Gronwall bound.
//! * [`fem1d`] is the piecewise-linear Dirichlet finite element space,
//!   tridiagonal operators and projections.
//! * [`timestep`] contains the discontinuous Galerkin time stepper for
//!   fractional diffusion, a product-integration scheme for general forcing,
//!   and the Mittag-Leffler modal reference solution.
//! * [`analysis`] turns stability and error estimates into measurable
//!   quantities: ratios across `alpha`, energy ledgers, rate tables and
//!   randomized inequality checks.
//! * [`catalog`] is the fixed set of named coefficient expressions used by
//!   the command-line front end and the Python bindings.

pub mod analysis;
pub mod catalog;
pub mod error;
pub mod fem1d;
pub mod fracops;
pub mod quadrature;
pub mod timestep;

pub use error::{Error, Result};
