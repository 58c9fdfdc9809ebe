//! Command-line surface: the expression-file format and the subcommands.

pub mod commands;
pub mod format;
