//! File formats, source wrappers, the HTTP service and the command line
//! around `kfind-core`.

pub mod api;
pub mod artifacts;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod report;
pub mod service;
pub mod snapshot;
pub mod sources;
pub mod synth;
