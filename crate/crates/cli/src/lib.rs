//! Library side of the `mif` command: file formats, DOT export, and the
//! subcommand implementations.

pub mod commands;
pub mod dot;
pub mod error;
pub mod files;
pub mod instance;

pub use error::{CliError, ExitStatus};
pub use instance::{Instance, SourceModel};
