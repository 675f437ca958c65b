//! Library backing the `nvsim` binary: run configuration, the contrast-stack
//! interchange format, the CSV dialect, and the subcommand implementations.
//!
//! Everything the binary does is reachable from here so integration tests can
//! exercise parsing and serialization without spawning processes. The binary
//! itself is a thin clap wrapper dispatching into [`commands`].
//!
//! Contracts shared by every subcommand:
//! - exit codes: 0 success, 2 input error, 3 numerical failure, 4 fit
//!   non-convergence (see [`error`]);
//! - runs that take a config and produce an output file write the fully
//!   resolved configuration next to the output (`<output>.effective.toml`),
//!   so any run can be reproduced from its artifacts alone;
//! - outputs are byte-identical for identical inputs regardless of the
//!   worker-thread count (`NVSIM_THREADS` only changes how fast answers
//!   arrive, never what they are).

pub mod commands;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod stack_file;

pub use config::RunConfig;
pub use error::{CliError, EXIT_FIT, EXIT_INPUT, EXIT_NUMERICAL};
