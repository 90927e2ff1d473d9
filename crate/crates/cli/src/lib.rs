//! Experiment harness around the relevance library: configuration, replica
//! orchestration, dataset generation, ingestion of external data, and output
//! emission (CSV, JSON, SVG).

pub mod config;
pub mod datasets;
pub mod ingest;
pub mod report;
pub mod runner;
pub mod selftest;
pub mod svg;
