//! Command-line front end for `gaussmode`: CMX file I/O, reports and the
//! subcommand dispatcher behind the `gaussmode` binary.

pub mod cmx;
pub mod commands;
pub mod report;

pub use commands::run;
