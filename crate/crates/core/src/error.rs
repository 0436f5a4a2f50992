use thiserror::Error;

/// Errors raised by the network-nonlocality toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unphysical Bloch form: minimum eigenvalue {min_eigenvalue:.3e}")]
    Unphysical { min_eigenvalue: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("{0}")]
    Parse(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("oracle mismatch: fast path {fast:.15} vs full trace {full:.15}")]
    OracleMismatch { fast: f64, full: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
