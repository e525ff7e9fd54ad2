//! Command-line front end for the gauge integration library.
//!
//! The binary `gauge` is a thin wrapper over [`commands`]; everything it
//! does is reachable from this library so that tests can drive jobs
//! without spawning processes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod expr;
pub mod registry;
pub mod report;
pub mod valspec;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("malformed valuation descriptor: {0}")]
    Descriptor(String),
    #[error(transparent)]
    Core(#[from] gauge_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Process exit codes.
pub mod exit {
    pub const CONVERGED: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const BUDGET_EXHAUSTED: i32 = 2;
}
