//! Standard-library companion of `rscc-core`: scenario files, artifact
//! formats, parallel grids, the acceptance report and the `rscc` CLI.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod par;
pub mod report;

pub use cli::run;
pub use error::{CliError, CliResult};
