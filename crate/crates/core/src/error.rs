use thiserror::Error;

use crate::rational::{fmt_rational, Rational};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("constant {value} at byte {offset} is outside [0,1]")]
    ConstantOutOfRange { offset: usize, value: String },

    #[error("exponent or multiplier must be at least 1 (byte {offset})")]
    ZeroExponent { offset: usize },

    #[error("variable `{0}` is not bound by the valuation")]
    UnboundVariable(String),

    #[error("value {value} of `{var}` is not an element of the chain with denominator {k}")]
    NotOnChain { var: String, value: String, k: u64 },

    #[error("bookkeeping closure violated: missing constants {}", render_list(.missing))]
    BookkeepingClosure { missing: Vec<Rational> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver budget exceeded: {what} limit of {limit} reached")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("variable `{0}` lies in a reserved namespace")]
    NamespaceCollision(String),

    #[error("oracle `{name}` violates its invariants at precision {precision}: {reason}")]
    OracleInvariant {
        name: String,
        precision: u32,
        reason: String,
    },

    #[error("incompatible oracle pair at precision {precision}: {reason}")]
    IncompatiblePair { precision: u32, reason: String },

    #[error("{0}")]
    Io(String),

    #[error("internal solver error: {0}")]
    Internal(String),
}

fn render_list(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(fmt_rational).collect();
    format!("{{{}}}", parts.join(", "))
}
