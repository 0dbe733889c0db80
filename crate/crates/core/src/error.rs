use thiserror::Error;

/// Errors raised by the library. Every variant maps to a stable token via [`Error::code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("{0}")]
    Domain(String),
    #[error(
        "not ultrametric: d(t{a},t{c}) = {lhs} > max(d(t{a},t{b}), d(t{b},t{c})) = {rhs}",
        a = .i + 1,
        b = .j + 1,
        c = .k + 1
    )]
    NotUltrametric {
        i: usize,
        j: usize,
        k: usize,
        lhs: f64,
        rhs: f64,
    },
    #[error("malformed encoding: {0}")]
    MalformedEncoding(String),
    #[error("data has {found} rows but the dendrogram has {expected} terminals")]
    Alignment { expected: usize, found: usize },
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("invalid dendrogram: {0}")]
    InvalidTree(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable token, used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Shape(_) => "E_SHAPE",
            Error::Parse { .. } => "E_PARSE",
            Error::Degenerate(_) => "E_DEGENERATE",
            Error::Index(_) => "E_INDEX",
            Error::Domain(_) => "E_DOMAIN",
            Error::NotUltrametric { .. } => "E_NOT_ULTRAMETRIC",
            Error::MalformedEncoding(_) => "E_MALFORMED",
            Error::Alignment { .. } => "E_ALIGNMENT",
            Error::ResourceGuard(_) => "E_RESOURCE",
            Error::InvalidTree(_) => "E_TREE",
            Error::Io(_) => "E_IO",
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
