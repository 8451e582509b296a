//! Command-line plumbing around `hierarchy-core`: configs, trace files,
//! certification reports and parameter sweeps.

pub mod certify;
pub mod config;
pub mod solve;
pub mod sweep;
pub mod trace;
pub mod wells;
