pub mod config;
pub mod harness;
pub mod ingest;
pub mod store;
pub mod synth;
pub mod trec;
