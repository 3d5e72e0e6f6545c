use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A domain-type invariant does not hold. The payload names the invariant.
    #[error("{0} violated")]
    InvalidParameter(&'static str),

    #[error("type threshold is undefined when a_high = a_low")]
    DegeneratePrior,

    #[error("signal h has zero probability (p = 0 and q = 0)")]
    ZeroProbabilitySignal,

    #[error("f_p is undefined at p = {0}")]
    FpDomain(f64),

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("(c, p) lies outside every closed-form case region")]
    OutOfCase,
}
