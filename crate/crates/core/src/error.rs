use thiserror::Error;

/// Errors raised by the simulator, the circuit builders and the search drivers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The requested register size exceeds what the dense simulator supports.
    #[error("size error: {0}")]
    Size(String),
    /// A gate addresses a qubit that is out of range or listed twice.
    #[error("index error: {0}")]
    Index(String),
    /// A register is unknown, overlaps another register, or is malformed.
    #[error("layout error: {0}")]
    Layout(String),
    /// An argument violates an operation's precondition.
    #[error("argument error: {0}")]
    Argument(String),
    /// A gate-list text could not be parsed.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
