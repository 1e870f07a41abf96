//! Special functions used by the moment formulas: an overflow-safe signed
//! log-Gamma, Pochhammer symbols and the Gauss hypergeometric function.

pub(crate) mod dd;
mod gamma;
mod hyp2f1;

pub use gamma::{
    gamma, gamma_ratio, log_gamma, log_pochhammer, pochhammer, sin_pi, SignedLogValue,
};
pub use hyp2f1::{
    gauss_2f1, gauss_2f1_complement, gauss_2f1_integral_oracle, HypergeometricParams, DEFAULT_TOL,
    MAX_SERIES_TERMS,
};
