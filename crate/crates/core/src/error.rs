use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `T†T` has an eigenvalue above one: the splitter would amplify.
    #[error("non-passive beam splitter: largest eigenvalue of T†T is {max_eigenvalue}")]
    NonPassive { max_eigenvalue: f64 },

    #[error("transmission matrix is not of the symmetric reciprocal form [[t, r], [r, t]]")]
    AsymmetricTransmission,

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("input coherence is zero, coherence absorption coefficient undefined")]
    ZeroCoherenceInput,

    #[error("input intensity is zero, intensity absorption coefficient undefined")]
    ZeroIntensityInput,

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Truncated norm deficit exceeded the configured tail budget.
    #[error("Fock cutoff {cutoff} too small: norm deficit {deficit:e} exceeds tolerance {tolerance:e}")]
    CutoffTooSmall {
        cutoff: usize,
        deficit: f64,
        tolerance: f64,
    },

    #[error("invalid sweep spec field `{field}`: {reason}")]
    InvalidSpec { field: String, reason: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl Error {
    /// Stable machine-readable name, used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NonPassive { .. } => "NonPassive",
            Error::AsymmetricTransmission => "AsymmetricTransmission",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::ZeroCoherenceInput => "ZeroCoherenceInput",
            Error::ZeroIntensityInput => "ZeroIntensityInput",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::CutoffTooSmall { .. } => "CutoffTooSmall",
            Error::InvalidSpec { .. } => "InvalidSpec",
            Error::Io(_) => "IoError",
        }
    }
}
