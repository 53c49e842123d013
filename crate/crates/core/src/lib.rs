//! Exact computations around hyperbolic Kac-Moody algebras of rank 2 realised
//! over real quadratic fields: plus-space modular forms, root systems, and
//! Borcherds products.

pub mod arith;
pub mod error;
pub mod qfield;
pub mod qseries;
pub mod plusforms;
pub mod rootsys;
pub mod borcherds;
pub mod asym;

pub use error::{Error, Result};
