use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown blendshape channel `{0}`")]
    UnknownChannel(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("profile error at `{path}`: {message}")]
    Profile { path: String, message: String },

    #[error("smoothing sigma must be >= 0, got {0}")]
    NegativeSigma(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: {message}")]
    Csv {
        row: usize,
        column: String,
        message: String,
    },

    #[error("timestamps must strictly increase (row {row})")]
    NonMonotonicTimestamp { row: usize },

    #[error("malformed motor frame: {0}")]
    Wire(String),

    #[error("unknown semantic `{0}`")]
    UnknownSemantic(String),

    #[error("calibration: {0}")]
    Calibration(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{path}: {source}")]
    InFile {
        path: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{}", format_aggregate(.0))]
    Aggregate(Vec<Error>),
}

fn format_aggregate(errors: &[Error]) -> String {
    let parts: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
    format!("{} errors: {}", errors.len(), parts.join("; "))
}

impl Error {
    /// Attach the file an error came from.
    pub fn in_file(path: impl Into<String>, source: Error) -> Self {
        Error::InFile {
            path: path.into(),
            source: Box::new(source),
        }
    }

    pub(crate) fn profile(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Profile {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn out_of_range(what: impl Into<String>, value: f64, min: f64, max: f64) -> Self {
        Error::OutOfRange {
            what: what.into(),
            value,
            min,
            max,
        }
    }
}
