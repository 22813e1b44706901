//! q-series evaluation with certified truncation bounds, an identity catalog
//! for q-analogues of pi-formulas, and the machinery to verify them.

pub mod error;
pub mod precision;
pub mod qcore;
pub mod catalog;
pub mod telescoping;
pub mod limits;
pub mod report;

pub use error::{Error, Result};
pub use precision::{BigReal, ErrorBound, Rational};
