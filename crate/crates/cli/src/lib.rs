//! Library side of the `toric-tee` command-line tool: job specs, the task
//! runner, reference targets and report rendering.

pub mod cli;
pub mod error;
pub mod report;
pub mod reproduce;
pub mod run;
pub mod spec;

pub use error::{CliError, CliResult};
pub use report::{ReportDocument, SCHEMA_VERSION};
pub use run::{run, RunOptions};
pub use spec::{parse_job, JobSpec};
