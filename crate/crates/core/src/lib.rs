//! Quasi-flat matrix models of discrete group duals and of the twisted
//! orthogonal quantum group `O_2^{-1}`.

pub mod cyclotomic;
pub mod error;
pub mod groups;
pub mod haarcalc;
pub mod linalg;
pub mod modelspace;
pub mod reproduce;
pub mod stationarity;
pub mod twist;

pub use error::{QfError, Result};
