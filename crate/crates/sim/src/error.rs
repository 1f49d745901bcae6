use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config is not valid JSON for this schema: {0}")]
    ConfigSyntax(#[source] serde_json::Error),
    #[error("invalid config: {0}")]
    InvalidConfig(#[source] subthz_core::Error),
    #[error("invalid campaign: {0}")]
    InvalidCampaign(String),
    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: subthz_core::Error,
    },
    #[error("campaign aborted: {failed} of {trials} trials failed (first: {first})")]
    Aborted {
        failed: usize,
        trials: u64,
        first: String,
    },
    #[error("no trial results to write")]
    EmptyResults,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl SimError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            SimError::ConfigSyntax(_)
            | SimError::InvalidConfig(_)
            | SimError::InvalidCampaign(_) => 2,
            SimError::Aborted { .. } | SimError::Trial { .. } => 3,
            _ => 1,
        }
    }
}
