use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("basis: {0}")]
    Basis(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("pseudopotential: {0}")]
    Pseudo(String),
    #[error("structure: {0}")]
    Structure(String),
    #[error("kernel: {0}")]
    Kernel(String),
    #[error("ewald: {0}")]
    Ewald(String),
    #[error("orbitals not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("{what} did not converge after {iterations} iterations (gnorm {gnorm:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        gnorm: f64,
    },
    #[error("linear algebra: {0}")]
    LinAlg(String),
    #[error("fci: {0}")]
    Fci(String),
    #[error("vqe: {0}")]
    Vqe(String),
    #[error("config: {0}")]
    Config(String),
    #[error("parse error in {file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Reads a text file, tagging I/O failures with the path.
pub(crate) fn read_text(path: impl AsRef<std::path::Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

impl Error {
    pub(crate) fn parse(file: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            msg: msg.into(),
        }
    }
}
