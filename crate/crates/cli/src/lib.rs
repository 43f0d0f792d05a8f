//! Command-line front end for cubic-transmuted Pareto models: dataset
//! ingestion, descriptive statistics, fitting, model comparison and curve
//! tabulation.

pub mod cli;
pub mod commands;
pub mod dataset;
pub mod error;
pub mod report;
pub mod summary;

pub use cli::{run, Cli};
pub use dataset::{Dataset, DatasetSource, FileSource, YearFilter};
pub use error::{CliError, Result};
pub use report::{FitEntry, FitReport, FitStatus};
pub use summary::{describe, Summary};
