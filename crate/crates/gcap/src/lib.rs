//! Command-line front end for `gcap-core`: channel spec files, JSON and
//! CSV reports, and parallel verification campaigns.

// `!(x >= t)` is deliberate: NaN must fail a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod cli;
pub mod error;
pub mod io;
pub mod report;

pub use error::{CliError, Result};
