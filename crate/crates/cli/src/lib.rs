//! Command-line front end for `commbounds`: file formats, bundled strategies
//! and the commands behind the `commbounds` binary.

pub mod jobs;
pub mod record;
pub mod strategy;

pub use jobs::{cmd_bound, cmd_scan, cmd_verify, JobSpec, Method, Params, Source};
pub use record::{Format, ResultRecord};
