use thiserror::Error;

pub type Result<T> = std::result::Result<T, QobfError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QobfError {
    /// Requested state does not fit under the configured qubit cap.
    #[error(
        "cannot allocate a {width}-qubit statevector ({bytes} bytes of amplitudes); \
         the limit is {max} qubits"
    )]
    Resource { width: usize, max: usize, bytes: u128 },

    /// Malformed gate or circuit (index collision, out-of-range index, bad layout).
    #[error("invalid construction: {0}")]
    Construction(String),

    #[error("width mismatch: expected {expected} qubits, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The target cannot be written as x+y+z with the requested register width.
    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("no valid solutions (M = 0); reject unreachable targets before planning iterations")]
    NoSolutions,

    #[error("parse error on line {line} at `{token}`: {message}")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },

    #[error("{0}")]
    Io(String),
}

impl QobfError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            QobfError::Constraint(_) | QobfError::NoSolutions | QobfError::InvalidArgument(_) => 2,
            QobfError::Resource { .. } => 3,
            QobfError::Io(_) => 4,
            QobfError::Parse { .. } => 4,
            QobfError::Construction(_) | QobfError::WidthMismatch { .. } => 1,
        }
    }
}

impl From<std::io::Error> for QobfError {
    fn from(err: std::io::Error) -> Self {
        QobfError::Io(err.to_string())
    }
}
