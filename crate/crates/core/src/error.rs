use std::path::{Path, PathBuf};

use thiserror::Error;
use uc_milp::{MilpError, ModelError};

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Format(String),
    #[error("{entity} references unknown bus {bus}")]
    DanglingBus { entity: String, bus: String },
    #[error("non-convex fuel curve for gen {0}")]
    NonConvexFuel(String),
    #[error("horizon mismatch for {entity}: expected {expected} hours, found {found}")]
    HorizonMismatch { entity: String, expected: usize, found: usize },
    #[error("invalid {entity}: {reason}")]
    Invalid { entity: String, reason: String },
    #[error("network is disconnected: bus {0} unreachable from the slack bus")]
    Disconnected(String),
    #[error("singular susceptance matrix")]
    SingularNetwork,
    #[error("unknown wind farm {0}")]
    UnknownFarm(String),
    #[error("covariance matrix is not positive semi-definite (jitter cap {0} reached)")]
    NotPsd(f64),
    #[error("model construction: {0}")]
    Model(#[from] ModelError),
    #[error("MILP solve failed in {stage}: {source}")]
    Solve { stage: String, source: MilpError },
    #[error("LP solve failed in {stage}: status {status}")]
    Lp { stage: String, status: String },
    #[error("unknown strategy `{name}`; valid strategies: {catalog}")]
    UnknownStrategy { name: String, catalog: String },
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub fn csv(path: &Path, source: csv::Error) -> Self {
        Error::Csv { path: path.to_path_buf(), source }
    }

    pub fn json(path: &Path, source: serde_json::Error) -> Self {
        Error::Json { path: path.to_path_buf(), source }
    }

    pub fn invalid(entity: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid { entity: entity.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
