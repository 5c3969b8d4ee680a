use std::path::PathBuf;

/// Errors surfaced by the file formats, the sweep driver and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("DFG syntax error at line {line}, column {column}: {message}")]
    DfgSyntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("empty DFG")]
    EmptyDfg,
    #[error("invalid DFG: {0}")]
    InvalidDfg(String),
    #[error("library: {0}")]
    Library(String),
    #[error("config: {0}")]
    Config(String),
    #[error("property syntax error at position {position}: {message}")]
    PropertySyntax { position: usize, message: String },
    #[error("unsupported construct at position {position}: {construct}")]
    Unsupported { position: usize, construct: String },
    #[error("{context}: {source}")]
    DesignPoint {
        context: String,
        source: tmrdep_core::Error,
    },
    #[error(transparent)]
    Model(#[from] tmrdep_core::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for solver failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        use tmrdep_core::Error as E;
        let core = match self {
            Error::DesignPoint { source, .. } | Error::Model(source) => source,
            _ => return false,
        };
        matches!(core, E::Singular { .. } | E::NotADistribution | E::NonFiniteRate)
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
