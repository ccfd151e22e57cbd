//! The `.mkb` knowledge-base language.
//!
//! ```text
//! kb        := statement*
//! statement := rule | askable | goal | net
//! rule      := "rule" IDENT ":" "if" premise "then" avpair "cf" NUMBER "."
//! premise   := conj ( "or" conj )*
//! conj      := atom ( "and" atom )*
//! atom      := "(" premise ")" | avpair
//! avpair    := IDENT "=" value
//! value     := IDENT | STRING | NUMBER
//! askable   := "askable" IDENT "prompt" STRING [ "menu" "(" value ( "," value )* ")" ] "."
//! goal      := "goal" IDENT "."
//! net       := "net" IDENT "(" IDENT "," IDENT ")" "."
//! IDENT     := [a-z][a-z0-9_]*
//! NUMBER    := -?[0-9]+(\.[0-9]+)?
//! ```
//!
//! `%` starts a comment running to the end of the line. Keywords are
//! contextual, so `goal` or `and` are still usable as attribute names or values.

mod ast;
mod diag;
mod lexer;
mod parser;
mod serialize;
mod validate;

pub use ast::{is_identifier, AVPair, Askable, Goal, KnowledgeBase, Premise, Rule, Span, Triple, Value};
pub use diag::{code, Diagnostic, Severity};
pub use parser::{parse_avpair, parse_kb, parse_rule};
pub use serialize::{premise_text, serialize_kb, serialize_rule};
pub use validate::validate_kb;
