//! File formats and command-line plumbing for `softgrasp-core`.
//!
//! All readers convert to SI units on load; all writers emit SI units.

pub mod error;
pub mod map;
pub mod output;
mod table;
pub mod trace;

pub use error::{FormatError, Result};
