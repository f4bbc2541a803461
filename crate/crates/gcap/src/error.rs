use std::path::PathBuf;

/// Errors surfaced by the command-line layer, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed spec: {0}")]
    Syntax(#[from] serde_json::Error),

    #[error("invalid field `{field}`: {reason}")]
    Field { field: String, reason: String },

    #[error("invalid argument `{name}`: {reason}")]
    Argument { name: &'static str, reason: String },

    #[error("no closed form for `{kind}` channels; rerun with --numeric")]
    Unsupported { kind: &'static str },

    #[error(transparent)]
    Core(#[from] gcap_core::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn field(field: impl Into<String>, reason: impl ToString) -> Self {
        CliError::Field {
            field: field.into(),
            reason: reason.to_string(),
        }
    }

    pub fn argument(name: &'static str, reason: impl ToString) -> Self {
        CliError::Argument {
            name,
            reason: reason.to_string(),
        }
    }

    /// 3 for unsupported closed-form requests, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Unsupported { .. } | CliError::Core(gcap_core::Error::UnsupportedKind { .. }) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
