//! File formats, seeded random instances, JSON reports and the command
//! implementations behind the `blockdiag` binary.

pub mod commands;
pub mod format;
pub mod generate;
pub mod report;

pub use blockdiag_core as core;
