//! Verification suites, volume computations and the sup search behind the
//! `qkahler` command.

pub mod config;
pub mod criteria;
pub mod report;
pub mod suites;
pub mod volume;

pub use config::{RunConfig, Tolerances};
pub use report::{Check, Report, Status};
