//! Quadratic twists of elliptic-curve L-functions at the central point.

pub mod arith;
pub mod error;
pub mod exec;
pub mod gauss;
pub mod lfunc;
pub mod moments;
pub mod special;

pub use error::{Error, Result};
pub use exec::Exec;
