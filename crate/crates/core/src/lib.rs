//! Quasihomogeneous Toeplitz operators on the Bergman space of the unit disc,
//! represented exactly as weighted shifts on the monomial basis.
//!
//! - [`mellin`]: radial symbols and their Mellin transforms.
//! - [`special`]: log-space Gamma/Beta, Gamma ratios, rationality tests.
//! - [`operators`]: weighted-shift algebra and the Bergman projection oracle.
//! - [`roots`]: Beta-formula roots of `T_{e^{ipθ}r^n}`.
//! - [`commutant`]: residual forms of the commutation condition and the feasibility scan.
//! - [`report`]: deterministic JSON/CSV/SVG export.

// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commutant;
pub mod error;
pub mod mellin;
pub mod operators;
pub mod quadrature;
pub mod report;
pub mod roots;
pub mod special;

pub use error::{Error, Result};
