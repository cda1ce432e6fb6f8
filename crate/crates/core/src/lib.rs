//! Shill-bidding training datasets from online auction records.
//!
//! The pipeline runs ingest, preprocess, metric computation and outlier
//! filtering. Numeric code is generic over the scalar type; the aliases
//! below fix the common choices.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod filter;
pub mod ingest;
pub mod metrics;
pub mod preprocess;
pub mod report;
pub mod synth;

#[cfg(test)]
mod test_support;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use filter::{fences, quartiles, run_filter, Fences, FilterReport};
pub use metrics::{build_samples, Feature, MetricConfig, SbSample};
pub use preprocess::{Auction, BidderHistory, RateTable};

pub use num_rational::Rational64;

/// Scored sample in double precision.
pub type Sample = SbSample<f64>;
pub type Sample32 = SbSample<f32>;
pub type FenceSet = Fences<f64>;
/// Fences computed in exact rational arithmetic.
pub type ExactFences = Fences<Rational64>;
pub type Metrics = MetricConfig<f64>;
pub type Report = FilterReport<f64>;
