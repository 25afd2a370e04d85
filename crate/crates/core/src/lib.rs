// Index loops mirror the matrix algebra they implement.
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod cli;
pub mod copoint;
pub mod error;
pub mod grmod;
pub mod linalg;
pub mod nmf;
pub mod parse;
pub mod par;
pub mod ring;
pub mod scalar;
pub mod twist;

pub use error::{Error, Result};
