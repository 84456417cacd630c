use std::fmt;

/// Failures mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Schema or usage violation; exit code 2.
    Usage(String),
    /// Numeric or domain failure inside a module; exit code 3.
    Numeric(String),
}

impl CliError {
    pub fn usage(field: &str, msg: impl fmt::Display) -> Self {
        CliError::Usage(format!("{field}: {msg}"))
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

impl From<scalecalc::Error> for CliError {
    fn from(e: scalecalc::Error) -> Self {
        use scalecalc::Error as E;
        let msg = e.to_string();
        match e {
            E::Parameter { .. } | E::Contraction { .. } | E::Format(_) | E::Io(_) => {
                CliError::Usage(msg)
            }
            E::GridMismatch { .. }
            | E::Grid(_)
            | E::Singularity(_)
            | E::Node { .. }
            | E::Fit(_) => CliError::Numeric(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
