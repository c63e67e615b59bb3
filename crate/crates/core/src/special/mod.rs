//! Log-space Gamma and Beta evaluation, Gamma-ratio objects, the
//! rationality criterion with its interpolation oracle, and the
//! proportionality detector.

mod gamma;
mod oracle;
mod proportional;
mod ratio;
mod rational;

pub use gamma::{beta, ln_gamma_diff, ln_gamma_signed, log_gamma};
pub use oracle::{rational_detect_oracle, HELD_OUT_TOL};
pub use proportional::{cross_residual, proportionality_test, GridFn};
pub use ratio::{gamma_ratio_eval, is_rational_criterion, GammaFactor, GammaRatio};
pub use rational::{rationalfn_reduce, rationalfn_reduce_ints, rationalize, Poly, RationalFn};
