//! Searching-with-lies strategies and online algorithms driven by
//! possibly erroneous advice.

pub mod advice;
pub mod bounds;
pub mod error;
pub mod games;
pub mod harness;
pub mod problems;

pub use advice::{AdviceOracle, ErrorPolicy, ErrorReport, Truth};
pub use bounds::{BoundReport, QueryBudget};
pub use error::{Error, Result};
pub use games::{Query, Transcript};
pub use harness::{ExperimentConfig, Problem, ResultRow};
