//! Satisfiability of equations with rational constraints in free groups and
//! free monoids with involution.
//!
//! The pipeline reduces a group formula to a single equation with Boolean
//! matrix constraints ([`frontend`]), which is then decided by a bounded
//! search over base changes, projections and partial solutions
//! ([`solver`]). The [`engine`] module also replays the completeness
//! argument: given a solution it builds a verified chain of arcs down to a
//! variable-free equation.

pub mod automata;
pub mod constraints;
pub mod engine;
pub mod error;
pub mod expressions;
pub mod format;
pub mod frontend;
pub mod solver;
pub mod words;

pub use error::{Error, Result};
pub use expressions::ExpExpr;
pub use words::{Alphabet, Interval, Kind, Sym, Word};
