//! File formats, reports and rendering around `mss-core`, plus the
//! functions behind the `mss` command line.

pub mod commands;
mod error;
pub mod oracle;
pub mod report;
pub mod settings;
pub mod spec;
pub mod svg;

pub use error::{Result, ToolError};
pub use report::{AnalysisReport, EventReport};
pub use settings::{ConfigEcho, ConfigFile, Overrides};
pub use spec::CurveSpec;
