//! Keyed Bloom filter encodings for machine-learning pipelines.
//!
//! The crate turns raw samples (tabular rows, text, time series, images) into
//! fixed-width keyed Bloom filter bit arrays, and provides the analysis suite
//! that goes with them: closed-form and empirical filter metrics, distance
//! preservation checks, and a small from-scratch logistic regression used to
//! measure how much task signal the encoding keeps.

pub mod bloom;
pub mod classifier;
pub mod config;
pub mod distance;
pub mod ebf;
pub mod error;
pub mod features;
pub mod hashing;
pub mod ingest;
pub mod metrics;
pub mod record;
pub mod sweep;
pub mod synth;

pub use bloom::{contains, encode_dataset, encode_record, merge, BloomVector};
pub use config::EncodingConfig;
pub use error::Error;
pub use record::FeatureRecord;
