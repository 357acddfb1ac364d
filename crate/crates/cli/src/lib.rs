//! File formats and command implementations behind the `shifteq` binary.

pub mod commands;
pub mod format;
