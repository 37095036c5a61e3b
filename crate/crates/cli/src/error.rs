use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] hermult_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// The object written to stderr on failure.
#[derive(Debug, Serialize)]
pub struct ErrorObject {
    pub schema: u32,
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<&'static str>,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use hermult_core::Error as E;
        match self {
            CliError::Core(E::Unsupported { .. } | E::CriterionNotFinite(_)) => 3,
            CliError::Core(E::Convergence { .. } | E::Inconclusive(_)) => 4,
            _ => 2,
        }
    }

    pub fn to_object(&self) -> ErrorObject {
        use hermult_core::Error as E;
        let (error, hypothesis) = match self {
            CliError::Core(E::Unsupported { hypothesis }) => ("unsupported_regime", Some(*hypothesis)),
            CliError::Core(E::CriterionNotFinite(_)) => ("unsupported_regime", None),
            CliError::Core(E::Convergence { .. } | E::Inconclusive(_)) => ("convergence", None),
            CliError::Core(E::Domain(_)) => ("domain", None),
            CliError::Core(E::Capability(_)) => ("capability", None),
            _ => ("config", None),
        };
        ErrorObject { schema: crate::SCHEMA, error, message: self.to_string(), hypothesis }
    }
}
