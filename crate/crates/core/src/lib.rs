//! Pseudospectral simulation and analysis of the 2-D periodic
//! Euler-Oldroyd-B system, its Voigt regularization, and the limiting
//! Navier-Stokes equations.
//!
//! The crate is organized around a small spectral kernel:
//!
//! - [`spectral`]: periodic grid, FFT transforms, differential operators,
//!   dealiasing, Leray projection, Helmholtz inversion.
//! - [`fields`]: typed velocity/stress fields and the tensor calculus of the
//!   model (symmetric/antisymmetric gradients, the rotation correction Q,
//!   advection, vorticity, the tightened variable).
//! - [`linear`]: closed-form dispersion relation of the linearized system,
//!   a per-mode linearized stepper, and the norm-inflation ODE.
//! - [`solver`]: time integration of the three nonlinear systems.
//! - [`energy`]: spectral Sobolev norms, two-tier energy ledgers, decay fits
//!   and relaxation-limit metrics.
//! - [`initial`]: named initial-condition generators.

pub mod energy;
pub mod fields;
pub mod fit;
pub mod initial;
pub mod linear;
pub mod solver;
pub mod spectral;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
