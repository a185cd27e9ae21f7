//! Numerical companion to Shiu-type upper bounds for nonnegative
//! multiplicative functions over short intervals in arithmetic progressions.
//!
//! The crate factors intervals with a segmented sieve, evaluates
//! multiplicative functions in log domain, tabulates the Dickman function,
//! counts smooth numbers exactly, and compares interval sums against the
//! cores of the bounds (their right-hand sides without implied constants).
//! The [`harness`] module runs grid scans and writes CSV reports.

pub mod arith;
pub mod bounds;
pub mod dickman;
pub mod error;
pub mod harness;
pub mod logvalue;
pub mod multfunc;

pub use error::{Error, Result};
pub use logvalue::{LogSum, LogValue};
