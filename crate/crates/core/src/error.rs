use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: domain error: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("{op}: pole at {detail}")]
    Pole { op: &'static str, detail: String },

    #[error("{op}: singular denominator at {detail}")]
    Singularity { op: &'static str, detail: String },

    #[error("{op}: expected exactly one reflectance dip, found {} candidate(s) {candidates:?}", candidates.len())]
    Ambiguity { op: &'static str, candidates: Vec<f64> },

    #[error("{op}: resource limit: {msg}")]
    Resource { op: &'static str, msg: String },

    #[error("{op}: model error: {msg}")]
    Model { op: &'static str, msg: String },

    #[error("{op}: degenerate input: {msg}")]
    Degenerate { op: &'static str, msg: String },

    #[error("{op}: boundary error: {msg}")]
    Boundary { op: &'static str, msg: String },

    #[error("unknown catalog entry `{name}`; available: {}", available.join(", "))]
    Catalog { name: String, available: Vec<&'static str> },

    #[error("{op}: configuration error: {msg}")]
    Config { op: &'static str, msg: String },

    #[error("{op}: differentiation error: {msg}")]
    Differentiation { op: &'static str, msg: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub(crate) fn config(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Config { op, msg: msg.into() }
    }

    /// Name of the operation that raised the error.
    pub fn op(&self) -> &str {
        match self {
            Error::Domain { op, .. }
            | Error::Pole { op, .. }
            | Error::Singularity { op, .. }
            | Error::Ambiguity { op, .. }
            | Error::Resource { op, .. }
            | Error::Model { op, .. }
            | Error::Degenerate { op, .. }
            | Error::Boundary { op, .. }
            | Error::Config { op, .. }
            | Error::Differentiation { op, .. } => op,
            Error::Catalog { .. } => "bound_catalog",
        }
    }

    /// True for configuration-class failures (bad inputs rather than numerics).
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::Catalog { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
