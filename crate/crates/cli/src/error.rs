//! Command errors tagged with the pipeline stage that raised them.

use std::fmt;

/// Pipeline stage named in runtime error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Preprocess,
    Vectorize,
    Resample,
    Classify,
    Evaluate,
    Bundle,
    Input,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Preprocess => "preprocess",
            Stage::Vectorize => "vectorize",
            Stage::Resample => "resample",
            Stage::Classify => "classify",
            Stage::Evaluate => "evaluate",
            Stage::Bundle => "bundle",
            Stage::Input => "input",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or arguments; exit code 1.
    Usage(String),
    /// Anything that failed while running; exit code 2.
    Runtime { stage: Stage, source: anyhow::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime { .. } => 2,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            CliError::Usage(_) => None,
            CliError::Runtime { stage, .. } => Some(*stage),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Runtime { stage, source } => write!(f, "{stage} failed: {source:#}"),
        }
    }
}

impl std::error::Error for CliError {}

pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> StageExt<T> for Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T, CliError> {
        self.map_err(|e| CliError::Runtime {
            stage,
            source: e.into(),
        })
    }
}
