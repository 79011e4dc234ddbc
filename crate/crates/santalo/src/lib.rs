//! File formats, JSON documents and the `santalo` command-line tool for
//! [`santalo_core`].

pub mod cli;
mod error;
pub mod format;
pub mod json;

pub use error::{exit, CliError, Result};
