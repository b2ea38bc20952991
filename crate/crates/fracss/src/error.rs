//! Error type shared by every module of the crate.

use std::fmt;

/// Errors produced by model construction, operator evaluation, and
/// simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid argument or model configuration (non-finite parameter,
    /// violated model invariant, malformed request). The message names
    /// the offending quantity.
    Config(String),
    /// A simulation produced a non-finite state. `step` is the first
    /// sample index at which a non-finite value appeared.
    Instability { step: usize },
    /// The reference continued-fraction/Padé expansion could not be
    /// computed at the requested depth (degenerate coefficient table).
    NonConvergent(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Instability { step } => {
                write!(f, "instability: non-finite state first appeared at step {step}")
            }
            Error::NonConvergent(msg) => write!(f, "expansion did not converge: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
