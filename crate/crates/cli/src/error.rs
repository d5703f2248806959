//! Pipeline-level errors and their process exit codes.
//!
//! Exit code contract: 0 success, 1 internal/environment error, 2 invalid
//! input, 3 strict-mode constraint failure.

use std::path::PathBuf;
use thiserror::Error;

use imbf_core::image::ImageError;
use imbf_core::manifest::DatasetError;
use imbf_core::metrics::MetricsError;
use imbf_core::nn::NnError;
use imbf_core::rebalance::RebalanceError;
use imbf_core::train::TrainError;

/// Loading failures specific to the checkpoint container.
#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("not a checkpoint (bad magic bytes)")]
    NotACheckpoint,
    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("checkpoint file is truncated")]
    Truncated,
    #[error("checkpoint metadata is inconsistent: {0}")]
    Metadata(String),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Dataset(#[from] DatasetError),
    #[error("{0}")]
    Image(#[from] ImageError),
    #[error("{0}")]
    Rebalance(#[from] RebalanceError),
    #[error("{0}")]
    Train(#[from] TrainError),
    #[error("{0}")]
    Metrics(#[from] MetricsError),
    #[error("{0}")]
    Nn(#[from] NnError),
    #[error("{path}: {msg}")]
    FileFormat { path: PathBuf, msg: String },
    #[error("checkpoint {path}: {source}")]
    Checkpoint {
        path: PathBuf,
        #[source]
        source: CheckpointError,
    },
    #[error("{path}: cannot decode image: {source}")]
    ImageCodec {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("unknown class directory {token:?} in {path}")]
    UnknownClassToken { token: String, path: PathBuf },
    #[error("no images found under {root}")]
    ZeroImages { root: PathBuf },
    #[error("manifest validation failed:\n{report}")]
    ManifestInvalid { report: String },
    #[error("plan does not match the manifest: class {class:?} has {manifest_count} training originals but the plan says {plan_count}")]
    PlanMismatch {
        class: String,
        manifest_count: u64,
        plan_count: u64,
    },
    #[error("invalid {what}: {msg}")]
    Invalid { what: String, msg: String },
    #[error("scaling constraint violated: alpha*beta^2*gamma^2 = {value:.4}, outside 2 +/- 0.1")]
    ConstraintViolated { value: f64 },
}

impl PipelineError {
    pub fn invalid(what: impl Into<String>, msg: impl Into<String>) -> Self {
        PipelineError::Invalid {
            what: what.into(),
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }

    /// Maps the error onto the documented exit codes.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Io { .. } | PipelineError::ImageCodec { .. } => 1,
            PipelineError::ConstraintViolated { .. } => 3,
            _ => 2,
        }
    }
}
