//! Library side of the `hcrev` binary: instance generation, algorithm runs
//! with CSV records, theorem suites and benchmark tables.
//!
//! Exit-code contract used by the binary: 0 when a command succeeds with no
//! violations, 1 when a verify suite finds a violation, 2 for any
//! [`CliError`].

pub mod bench;
pub mod commands;
mod error;
pub mod record;
pub mod verify;

pub use error::{CliError, CliResult};
