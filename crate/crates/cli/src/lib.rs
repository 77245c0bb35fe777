//! Command-line front end: configuration, run orchestration and plotting.

pub mod config;
pub mod error;
pub mod run;
pub mod svg;

pub use config::{Cli, Mode, RunConfig};
pub use error::{CliError, ErrorPayload};
pub use run::{run, RunSummary};
