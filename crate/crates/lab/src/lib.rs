//! Configuration, file formats, the `gamow` command line and the
//! acceptance report on top of `gamow-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod session;

pub use commands::LabError;
pub use config::RunConfig;
pub use session::Session;
