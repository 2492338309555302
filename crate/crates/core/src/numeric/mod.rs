//! Special functions and the reference distributions used by the tests.

mod distributions;
mod special;

pub use distributions::{chi2_cdf, chi2_sf, f_cdf, f_sf, TailProbability, UNDERFLOW};
pub use special::{ln_beta, ln_gamma, regularized_beta, regularized_gamma, Evaluated};
