//! Constraint model transpiler.
//!
//! Source models written in an object-oriented constraint language are
//! injected into a pivot representation, checked, refactored by a chain of
//! passes, and emitted as a constraint logic program. A brute-force
//! interpreter over pivot models gives exact solution sets, which is how
//! the passes are shown to preserve meaning.

pub mod backend;
pub mod checker;
pub mod frontend;
pub mod ir;
pub mod oracle;
pub mod passes;
pub mod pipeline;
pub mod problem;

pub use problem::{Problem, Severity};
