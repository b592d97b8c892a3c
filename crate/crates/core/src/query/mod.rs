//! The search query language.
//!
//! ```text
//! query := or
//! or    := and ( "OR" and )*
//! and   := atom ( ["AND"] atom )*
//! atom  := "(" query ")" | field ":" value | "theme:" value | "\"" phrase "\"" | word
//! field := unit | site | status | type | title | name | year | id
//! value := word | "\"" text "\""
//! ```
//!
//! `AND` and `OR` are recognised only in upper case. Two atoms next to each
//! other are joined with AND, and AND binds tighter than OR. Inside quotes,
//! `\"` and `\\` escape a quote and a backslash.

mod ast;
mod lexer;
mod parser;
mod print;

pub use ast::{FieldName, QueryAst};
pub use parser::parse_query;
pub use print::print_query;

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("empty query")]
    EmptyQuery,
    #[error("syntax error at position {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
}
