use thiserror::Error;

/// Errors raised by the library. The CLI maps [`Error::is_certification`]
/// failures to exit code 3 and everything else to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("field windows differ")]
    WindowMismatch,
    #[error("non-finite or oversized amplitude at site index {0}")]
    NonFinite(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("data support plus kernel half-width {needed} exceeds window radius {radius} on axis {axis}")]
    SupportOverflow { axis: usize, needed: usize, radius: usize },
    #[error("field must be supported in the inner half of the window")]
    SupportTooWide,
    #[error("tail certificate violated at t = {time}: tail/total = {ratio:e}")]
    TailCertificate { time: f64, ratio: f64 },
    #[error("weighted sum diverged or overflowed: {0}")]
    Divergent(String),
    #[error("weight overflows on the window: {0}")]
    WeightOverflow(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("guard band violated: {0}")]
    Guard(String),
    #[error("time grid too coarse for finite differences: {0}")]
    GridTooCoarse(String),
    #[error("imaginary residue {residue:e} exceeds tolerance")]
    ComplexResidue { residue: f64 },
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Window, tail, quadrature and guard failures: the numerics could not be
    /// certified, as opposed to a malformed request.
    pub fn is_certification(&self) -> bool {
        matches!(
            self,
            Error::SupportOverflow { .. }
                | Error::SupportTooWide
                | Error::TailCertificate { .. }
                | Error::Divergent(_)
                | Error::WeightOverflow(_)
                | Error::Quadrature(_)
                | Error::Guard(_)
                | Error::GridTooCoarse(_)
                | Error::ComplexResidue { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
