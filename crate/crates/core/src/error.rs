use thiserror::Error;

use crate::config::ConfigError;
use crate::dataset::DatasetError;
use crate::filter::FilterError;
use crate::ingest::IngestError;
use crate::synth::SynthError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("missing input: {0}")]
    MissingInput(String),
}

impl Error {
    /// Short stable tag for machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Ingest(_) => "ingest",
            Error::Dataset(_) => "dataset",
            Error::Synth(_) => "synth",
            Error::Filter(_) => "filter",
            Error::Csv(_) => "csv",
            Error::Io { .. } => "io",
            Error::EmptyInput(_) => "empty_input",
            Error::MissingInput(_) => "missing_input",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
