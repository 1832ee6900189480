//! Command-line harness: theory-curve sweeps, seeded parallel Monte Carlo
//! comparisons, one-shot decisions and SVG plots.

pub mod config;
pub mod curves;
pub mod decide;
pub mod error;
pub mod plot;
pub mod seed;
pub mod simulate;
pub mod spec;

pub use error::{HarnessError, Result};
