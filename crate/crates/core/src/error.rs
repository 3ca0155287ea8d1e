use alloc::string::String;

use thiserror::Error;

/// Errors raised by the analytical design layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Lambert W argument {0} is outside the principal-branch domain x >= -1/e")]
    LambertDomain(f64),
    #[error("{0}")]
    InvalidParameter(String),
    #[error("M = {m} antennas cannot serve K = {k} users (need M >= K)")]
    Dimension { m: u32, k: u32 },
    #[error("K = {k} users leaves no data symbols in a coherence block of T = {t}")]
    PilotOverhead { k: u32, t: u32 },
    #[error("degenerate problem: {0}")]
    Degenerate(&'static str),
    #[error("infeasible: {0}")]
    Infeasible(&'static str),
    #[error("integral diverges: {0}")]
    Divergent(&'static str),
    #[error("empty feasible range")]
    EmptyRange,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
