//! Front end for running topology experiments from recipe files and turning
//! their outputs into CSV, JSON and SVG artifacts.

pub mod commands;
pub mod config;
mod error;
pub mod plot;

pub use error::{CliError, CliResult};
