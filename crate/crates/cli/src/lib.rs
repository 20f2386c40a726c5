//! Library side of the `bfun` command-line tool.

pub mod cache;
pub mod report;
pub mod run;

pub use cache::Cache;
pub use report::{Check, Format, Report};
pub use run::{check_guard, estimate, run, Command, Outcome, RunConfig, RunError, Target};
