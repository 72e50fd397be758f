//! Command-line front end: scans, reports and verification runs over the
//! analyses in `abscope`.

mod app;
pub mod report;
pub mod scan;
pub mod verify;

pub use app::run_command;
pub use report::{emit_report, Format, ScanRecord};
pub use scan::{evaluate, parse_checks, parse_range, scan_range, Check};

/// Errors surfaced to the command line. All of them map to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("unknown command {0:?}")]
    UnknownCommand(String),
    #[error("bad flag: {0}")]
    BadFlag(String),
    #[error("unknown format {0:?}; expected json, csv or table")]
    UnknownFormat(String),
    #[error("no exponent class in the requested range")]
    RangeEmpty,
    #[error(transparent)]
    Core(#[from] abscope::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
