//! Exact symbolic algebra over the field of rational functions.

pub mod expr;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod solve;
pub mod symbol;

pub use expr::{Atom, Expr, FuncKind, ZeroTest};
pub use matrix::{QMatrix, Rref, SymbolicMatrix};
pub use parse::parse_expr;
pub use solve::{solve_algebraic, Solution};
pub use symbol::Symbol;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("indeterminate rank: cannot decide whether `{entry}` vanishes")]
    IndeterminateRank { entry: String },
    #[error("unsupported: equation `{equation}` depends non-rationally on `{unknown}`")]
    Unsupported { equation: String, unknown: String },
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}
