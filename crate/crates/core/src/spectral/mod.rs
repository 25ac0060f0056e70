//! Periodic spectral kernel on `[0, 2π)²`.
//!
//! Conventions used everywhere in this crate:
//!
//! - Fields are real; spectral coefficients are mode amplitudes, i.e. the
//!   forward transform divides by the grid point count so that
//!   `f(x) = Σ_k f̂_k e^{i k·x}` and single-mode examples are exact
//!   (`sin x` has coefficients `∓i/2` at `k = (±1, 0)`).
//! - Discrete Parseval: the grid average of `|f|²` equals `Σ_k |f̂_k|²`;
//!   the integral L² norm is `‖f‖² = (2π)² Σ_k |f̂_k|²`.
//! - Differential operators (and everything built on them: divergence,
//!   Leray projection, Helmholtz inversion) use Nyquist-zeroed wavenumbers,
//!   so the odd-ball mode `|k_i| = n/2` never contaminates real fields.
//! - Nonlinear products are formed pointwise in physical space and then
//!   truncated by the 2/3 rule (`|k_i| > n_i/3` zeroed).

mod field;
mod grid;
mod ops;

pub use field::{PhysicalField, SpectralField};
pub use grid::{Axis, Grid};
pub use ops::{
    dealias, derivative, divergence, hermitian_defect, inverse_helmholtz, leray_project,
};
