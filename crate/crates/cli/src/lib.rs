//! Library surface of the `rlip` binary: argument types, subcommand
//! implementations and the result-file formats with their readers.

pub mod cli;
pub mod commands;
pub mod report;
