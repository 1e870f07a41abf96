//! Generalized ultraspherical moments on interval sets with one or two
//! symmetric gaps.
//!
//! The moments
//!
//! ```text
//! ∫_E (cos φ_E)^n (1 - cos² φ_E)^μ w_E(x) dx
//! ```
//!
//! are evaluated along independent routes: closed forms built from Gamma
//! ratios and the Gauss hypergeometric function, the one-gap power series in
//! the gap parameter, and direct double-exponential quadrature over the
//! interval set. The polynomial identities behind the closed forms (Pell
//! solutions, the degree-four mapping and its branch inverses, and the
//! partial-fraction weights) are exposed so they can be certified
//! numerically.
//!
//! Modules:
//!
//! * [`specfun`]: signed log-Gamma, Pochhammer symbols, ₂F₁.
//! * [`geometry`]: the sets E₂ and E₄, cos φ and the Akhiezer weights.
//! * [`pell`]: dense polynomials, Pell solutions, branch inverses.
//! * [`moments`]: closed-form and series moment evaluators.
//! * [`quadrature`]: tanh-sinh oracle over the interval sets.

pub mod error;
pub mod geometry;
pub mod moments;
pub mod pell;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use geometry::{IntervalSet, MomentQuery, SetKind};
pub use moments::{moment, Method, MomentValue};
pub use pell::{PellData, PellSolution, Polynomial};
pub use quadrature::QuadratureSpec;
pub use specfun::{gauss_2f1, log_gamma, pochhammer, HypergeometricParams, SignedLogValue};
