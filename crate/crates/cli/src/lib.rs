//! Command-line front end for `sphere-ineq`: parameter sweeps, the grid
//! certificate, the threshold-crossing figure, the inequality harness and the
//! constants table, written as CSV, JSON and SVG.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;

pub use commands::{run, Outcome};
pub use config::{Command, Format, RunConfig};
pub use error::{CliError, Result};
