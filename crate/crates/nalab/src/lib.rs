//! IO companion to `nalab-core`: JSON file formats for models, proofs and
//! scenarios, the curated verdict corpus with its scenario builders, and
//! the command-line front end.

pub mod cli;
pub mod format;
pub mod suite;
