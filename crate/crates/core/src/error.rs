use thiserror::Error;

/// Errors raised by the spectral and scattering routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data (bad grid, out-of-range angle, singular transfer matrix, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A caller-side precondition does not hold for the supplied values.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("state became non-finite while integrating at lambda = {lambda}")]
    Overflow { lambda: String },

    /// Evaluation requested on (or numerically on top of) a pole.
    #[error("lambda = {lambda} lies on a pole; nearest eigenvalue estimate {eigenvalue}")]
    Pole { lambda: String, eigenvalue: f64 },

    #[error("eigenvalue simplicity violated near lambda = {0}")]
    DoubleRoot(f64),

    #[error("root count mismatch: found {found} zeros below {lambda_top}, asymptotics predict {predicted}")]
    MissedRoots {
        found: usize,
        predicted: usize,
        lambda_top: f64,
    },

    /// An extrapolated limit did not settle; the message carries a remedy hint.
    #[error("limit did not converge: {0}")]
    NonConvergent(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by user input or configuration rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Precondition(_)
                | Error::InsufficientData(_)
                | Error::Io(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
