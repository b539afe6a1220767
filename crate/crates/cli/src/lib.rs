//! Command-line front end for hypiso: classification verdicts, complex
//! building, verification and export, plus the built-in acceptance suite.

pub mod app;
pub mod criteria;
pub mod oracle;

pub use app::{run, run_args, Cli, Outcome};
