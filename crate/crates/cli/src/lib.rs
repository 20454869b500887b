//! Command-line front end: training, prediction, evaluation, oversampling,
//! comparison reports and projection scatters.

pub mod args;
pub mod bundle;
pub mod commands;
pub mod error;
pub mod scatter;

pub use args::Cli;
pub use bundle::ModelBundle;
pub use commands::run;
pub use error::{CliError, Stage};
