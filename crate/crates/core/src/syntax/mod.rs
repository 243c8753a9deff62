//! The three-sorted Denef-Pas language: terms, formulas, the concrete text
//! grammar, and the sort checker.
//!
//! ```text
//! formula := disj
//! disj    := conj ('\/' conj)*
//! conj    := unary ('/\' unary)*
//! unary   := '~' unary | ('exists' | 'forall') NAME ':' SORT unary
//!          | 'true' | 'false' | '(' formula ')' | atom
//! atom    := term ('=' | '<=' | '>=' | '<' | '>' | '!=') term
//!          | term '===' term 'mod' INT
//! term    := product (('+' | '-') product)*
//! product := neg ('*' neg)*
//! neg     := '-' neg | INT | 't' | NAME | 'ord' '(' term ')' | 'ac' '(' term ')' | '(' term ')'
//! ```
//!
//! Quantifiers bind tightly: the body is a single `unary`, so write
//! `exists y:VF (...)` around compound bodies.

mod ast;
mod format;
pub mod lexer;
mod parser;
mod typeck;

use thiserror::Error;

pub use ast::{Formula, Quantifier, Sort, Term, Var};
pub use format::format;
pub use parser::{parse_formula, parse_formula_with, parse_term_with, Cursor, Decls};
pub use typeck::{term_sort, typecheck, Signature};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("sort error at {line}:{col} in `{subterm}`: {msg}")]
    Sort {
        line: usize,
        col: usize,
        subterm: String,
        msg: String,
    },
    #[error("ill-sorted `{subterm}`: {msg}")]
    IllSorted { subterm: String, msg: String },
}
