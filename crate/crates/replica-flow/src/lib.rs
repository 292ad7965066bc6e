//! Sweeps, CSV formats and the `replica-flow` command line on top of
//! [`replica_flow_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod sweep;
pub mod table;

pub use error::{AppError, Result};
