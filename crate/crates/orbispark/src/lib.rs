//! File format, report rendering and command-line front end for `orbispark-core`.

pub mod cli;
pub mod format;
pub mod output;
