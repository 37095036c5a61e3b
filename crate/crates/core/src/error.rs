use alloc::string::String;

use crate::nuclearity::Verdict;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configured capacity (maximum degree, node count, term budget) was exceeded.
    #[error("capability exceeded: {0}")]
    Capability(String),
    /// Refinement stopped before two successive estimates agreed.
    #[error("no convergence: last two estimates {previous:e} and {last:e}")]
    Convergence { previous: f64, last: f64 },
    /// The exponents fall outside the hypotheses of the nuclearity theorems.
    #[error("unsupported regime: requires {hypothesis}")]
    Unsupported { hypothesis: &'static str },
    /// A series with infinite support and no decay envelope cannot be summed with a bound.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    /// The summability criterion did not certify finiteness, so no trace identity applies.
    #[error("criterion verdict is {0:?}, trace check refused")]
    CriterionNotFinite(Verdict),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}
