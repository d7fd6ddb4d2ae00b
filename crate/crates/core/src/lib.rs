//! Exact decision procedures for Łukasiewicz logic and Rational Pavelka
//! logic over the standard MV-algebra, implicit definability of rational
//! truth values, and the translation of rational constants into
//! implicitly defined variables.

pub mod cli;
pub mod constants;
pub mod definability;
pub mod error;
pub mod formula;
pub mod irrational;
pub mod parser;
pub mod rational;
pub mod semantics;
pub mod solver;

pub use error::{Error, Result};
pub use formula::{expand_abbreviations, signature_of, ExpansionMode, Formula, Theory, VarKind, Variable};
pub use parser::{parse_formula, render_formula};
pub use rational::Rational;
pub use semantics::{evaluate, evaluate_on_chain, ChainSpec, Valuation};
