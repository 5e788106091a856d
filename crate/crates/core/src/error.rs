use thiserror::Error;

/// Every failure the toolkit can report, grouped by diagnostic category.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A metric that has no defined value for the given graph (e.g. zero degree variance).
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short category name used in single-line CLI diagnostics.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Domain(_) => "domain",
            Error::Undefined(_) => "undefined",
            Error::Config(_) => "config",
            Error::Numeric(_) => "numeric",
            Error::DegenerateData(_) => "degenerate-data",
            Error::Parse { .. } => "parse",
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => "io",
        }
    }

    /// Process exit status for the category; 0 is reserved for success.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Parse { .. } => 2,
            Error::Config(_) => 3,
            Error::Domain(_) | Error::Undefined(_) => 4,
            Error::Numeric(_) | Error::DegenerateData(_) => 5,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 6,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
