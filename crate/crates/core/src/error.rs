use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The function has a pole (or an inverse-square-root singularity) at `at`.
    #[error("pole at {at}")]
    Pole { at: f64 },

    /// A series or quadrature did not reach its tolerance. `partial` is the
    /// best available estimate and `count` the number of terms or nodes used.
    #[error("no convergence after {count} terms/nodes (best estimate {partial:e})")]
    Convergence { partial: f64, count: usize },

    #[error("method `{method}` is not available for {family}")]
    MethodUnavailable {
        method: &'static str,
        family: &'static str,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
