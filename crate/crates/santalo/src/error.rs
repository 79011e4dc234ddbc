use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const INVALID_INPUT: i32 = 2;
    pub const NUMERICAL_FAILURE: i32 = 3;
    pub const UNSUPPORTED: i32 = 4;
    pub const USAGE: i32 = 64;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("cannot parse {0:?} as a rational number (use an integer or p/q)")]
    Rational(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    CellMismatch(String),

    #[error(transparent)]
    Core(#[from] santalo_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use santalo_core::Error as E;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Format { .. } | CliError::Rational(_) | CliError::Io { .. } | CliError::Json(_) => {
                exit::INVALID_INPUT
            }
            CliError::CellMismatch(_) => exit::INVALID_INPUT,
            CliError::Core(e) => match e {
                E::NotSimple { .. } | E::SizeGuard(_) => exit::UNSUPPORTED,
                E::LineSearchFailure { .. }
                | E::IterationLimit(_)
                | E::PathFailure { .. }
                | E::DegenerateStart
                | E::PositiveEndpoints(_)
                | E::LoopBudgetExhausted { .. }
                | E::SeedDisagreement { .. } => exit::NUMERICAL_FAILURE,
                _ => exit::INVALID_INPUT,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
